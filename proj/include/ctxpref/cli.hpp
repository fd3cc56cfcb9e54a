#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctxpref::cli {

// Exit codes.
inline constexpr int kOk = 0;
/// `prove` found the formula unsatisfiable (or not valid with --valid).
inline constexpr int kNegative = 1;
inline constexpr int kUsage = 2;
/// Unreadable or malformed input files, or a scenario the agents reject.
inline constexpr int kInputError = 3;

/// Runs one command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctxpref::cli
