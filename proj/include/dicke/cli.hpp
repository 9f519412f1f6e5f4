#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dicke::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kValidationFailed = 1,
  kUsage = 2,
  kEvaluationFailure = 3,
};

/// Runs one invocation.  args excludes the program name.  The document goes
/// to `out` (or the --output file); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dicke::cli
