#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jjchain {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitConfig = 2;

/// Parses `args` (without the program name), runs one subcommand and writes its artifacts plus
/// manifest.json into the output directory. Returns 0 on success, 1 on numeric, convergence or
/// I/O failure and 2 on a configuration or usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jjchain
