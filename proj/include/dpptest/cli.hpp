#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dpptest::cli {

/// Process exit statuses.
enum ExitCode : int {
  kSuccess = 0,
  kSuiteFailure = 1,
  kConfigError = 2,
  kIoError = 3,
};

/// Runs one subcommand (sample, test, learn, verify-lemmas, hardness, bench).
/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dpptest::cli
