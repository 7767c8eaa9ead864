#pragma once

#include <string>
#include <vector>

namespace tlmt::cli {

// Exit codes: 0 success, 2 config error, 3 compile error, 4 runtime error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCompile = 3;
inline constexpr int kExitRuntime = 4;

// The whole command surface, callable in-process for tests.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace tlmt::cli
