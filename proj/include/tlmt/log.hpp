#pragma once

#include <string>

namespace tlmt::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from the TLMT_LOG environment variable
// (error|warn|info|debug); default warn. Messages go to stderr.
Level level();
void set_level(Level lv);

void emit(Level lv, const std::string& msg);

inline void error(const std::string& msg) { emit(Level::Error, msg); }
inline void warn(const std::string& msg) { emit(Level::Warn, msg); }
inline void info(const std::string& msg) { emit(Level::Info, msg); }
inline void debug(const std::string& msg) { emit(Level::Debug, msg); }

}  // namespace tlmt::log
