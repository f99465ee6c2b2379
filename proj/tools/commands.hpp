#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tvk::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,
  kValidationFailure = 2,
  kCheckFailure = 3,
};

/// Runs one command line (without the program name); JSON goes to `out`,
/// diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tvk::cli
