#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ifrl::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationError = 1,
  kIoError = 2,
  kInternalError = 3,
};

/// Runs one subcommand. `args` excludes the program name. Errors are
/// reported on `err` as a single JSON line {"error": kind, "message": text}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ifrl::cli
