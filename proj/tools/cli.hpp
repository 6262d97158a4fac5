#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adahaar::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kParseError = 2,
  kValidationError = 3,
};

/// Runs one subcommand; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adahaar::cli
