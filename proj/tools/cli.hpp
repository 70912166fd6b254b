#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scalefree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParameter = 1;
inline constexpr int kExitNumerical = 2;

/// Runs one command line (without the program name). The artifact goes to
/// `out` unless --out names a file; diagnostics and usage go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads the `key=value` lines that precede the header row of an artifact or
/// config file, with or without the leading `#`.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path);

}  // namespace scalefree::cli
