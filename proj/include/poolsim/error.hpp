#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace poolsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& detail, const std::string& source = {})
      : Error((source.empty() ? "line " : source + ":") + std::to_string(line) + ": " + detail),
        line_(line),
        detail_(detail) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// Well-formed input that violates a domain invariant (duplicates, out-of-range values).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A caller passed arguments outside an operation's domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace poolsim
