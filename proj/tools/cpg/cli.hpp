#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cpg::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitResourceGuard = 2;
inline constexpr int kExitNumericalAbort = 3;

/// Runs the command line `args` (args[0] is the program name). CSV and
/// reports go to `out`, diagnostics to `err`; files named by --out are
/// written directly.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cpg::cli
