#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chargetune {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,      // bad flags, config or input file
  kExitFlaggedFit = 2,
  kExitSolver = 3,
};

/// Runs the command line `args` (without the program name). Reports go to
/// `out`; errors are written to `err` as one JSON object.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chargetune
