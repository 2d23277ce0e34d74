#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rroa {
namespace cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // infeasible solve, failed verdict
inline constexpr int kExitUsage = 2;    // bad flags, unreadable or invalid input

/// Parses `args` (without the program name) and runs the subcommand:
/// check | solve | certify | oracle | plot-data. Reports go to `out`,
/// errors to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cli
}  // namespace rroa
