#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wmp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitMath = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wmp::cli
