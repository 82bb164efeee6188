#pragma once

#include <ostream>
#include <span>
#include <string>

namespace ndcnp::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kIoError = 2,
  kVerificationFailure = 3,
};

/// Entry point shared by the `ndcnp` executable and the tests. `args`
/// excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ndcnp::cli
