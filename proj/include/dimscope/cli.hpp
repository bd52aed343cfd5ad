#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dimscope {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;   ///< unexpected error
inline constexpr int kExitUsage = 2;     ///< bad flags or arguments
inline constexpr int kExitInput = 3;     ///< unreadable or malformed input
inline constexpr int kExitCompute = 4;   ///< degenerate fit, out-of-range statistic, no convergence

/// Runs the dimscope command line; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dimscope
