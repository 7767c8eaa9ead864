#include "tlmt/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace tlmt::log {

namespace {

Level g_level = [] {
    const char* env = std::getenv("TLMT_LOG");
    if (!env) return Level::Warn;
    std::string s(env);
    if (s == "error") return Level::Error;
    if (s == "warn") return Level::Warn;
    if (s == "info") return Level::Info;
    if (s == "debug") return Level::Debug;
    return Level::Warn;
}();

std::mutex g_mutex;

const char* tag(Level lv) {
    switch (lv) {
        case Level::Error: return "error";
        case Level::Warn: return "warn";
        case Level::Info: return "info";
        case Level::Debug: return "debug";
    }
    return "?";
}

}  // namespace

Level level() { return g_level; }
void set_level(Level lv) { g_level = lv; }

void emit(Level lv, const std::string& msg) {
    if (static_cast<int>(lv) > static_cast<int>(g_level)) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::cerr << "[tlmt " << tag(lv) << "] " << msg << "\n";
}

}  // namespace tlmt::log
