#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lplab::cli {

inline constexpr const char* kVersion = "lplab 0.1.0";

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kValidationError = 2,
  kNumericalAbort = 3,
  /// The command ran but a check it performs reported violations.
  kCheckFailed = 4,
};

/// Runs one command line (without the program name). Option values come
/// from defaults, then the JSON file given by --config, then the flags.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lplab::cli
