#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dante {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one subcommand (clean, fit, forecast, score, evaluate, volatility,
/// selfcheck). args[0] is the program name. Messages go to `err`, reports to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dante
