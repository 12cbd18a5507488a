#pragma once

#include <string>
#include <utility>
#include <vector>

namespace poolsim {

// Non-fatal conditions collected while parsing or computing. Callers that do
// not care pass nothing; the library never prints on its own.
class Diagnostics {
 public:
  void warn(std::string message) { warnings_.push_back(std::move(message)); }

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  bool empty() const noexcept { return warnings_.empty(); }

 private:
  std::vector<std::string> warnings_;
};

}  // namespace poolsim
