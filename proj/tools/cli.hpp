#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace renewcount::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageOrData = 1,
  kNotConverged = 2,
  kNumericalFailure = 3,
};

/// Runs the command line `args` (args[0] is the program name), writing the
/// report to `out` and diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace renewcount::cli
