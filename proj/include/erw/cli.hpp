#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace erw::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kIndeterminate = 2,
  kAssertionFailure = 3,
};

/// Runs one command line (args[0] is the program name). Writes exactly one
/// JSON document to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace erw::cli
