// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLOGIC_TOOLS_CLI_HPP
#define TEAMLOGIC_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace teamlogic::cli {

enum ExitCode : int { kOk = 0, kFalse = 1, kUsage = 2, kResource = 3 };

/// Runs the command line `args` (without the program name). Output goes
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace teamlogic::cli

#endif  // TEAMLOGIC_TOOLS_CLI_HPP
