#pragma once

#include <stdexcept>

namespace polytrace::cli {

/// Bad flags or unreadable / malformed input files (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kExitPass = 0,
  kExitUsage = 1,
  kExitNumerical = 2,
  kExitStatistical = 3,
};

}  // namespace polytrace::cli
