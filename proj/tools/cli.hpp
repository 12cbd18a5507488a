#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace poolsim::cli {

/// Exit status for invalid input, configuration or arguments.
inline constexpr int kUsageError = 2;

/// Entry point shared by the `poolsim` binary and the tests. `args` excludes
/// the program name. Errors are reported on `err` as one line prefixed with
/// "poolsim: error: ".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace poolsim::cli
