#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace tlmt {

// Error taxonomy; the CLI maps these onto its exit codes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CompileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest decimal string that parses back to exactly the same double.
// Locale-independent (std::to_chars); "1" not "1.000000".
std::string format_double(double v);

// Split a CSV line on commas. No quoting: none of our formats need it.
std::vector<std::string> split_csv_line(const std::string& line);

std::string read_file(const std::filesystem::path& path);

// Write-temp-then-rename so partially written artifacts never appear
// under the final name.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace tlmt
