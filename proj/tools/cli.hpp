#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace confcalc::cli {

// Exit codes
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;         // usage, input or evaluation error
inline constexpr int kNonexistence = 2;  // derivative/integral does not exist, or a check failed
inline constexpr int kNonConvergence = 3;

/// Runs one invocation. args excludes the program name, e.g. {"deriv", "--expr", "t", ...}.
/// JSON results go to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace confcalc::cli
