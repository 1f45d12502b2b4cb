#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace consensus_lab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,
  kExitUsage = 2,
  kExitRuntime = 3,
};

/// Runs the command line `args` (without the program name). Payload goes to
/// `out` (or to --out files), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace consensus_lab::cli
