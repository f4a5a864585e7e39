#pragma once

#include <stdexcept>
#include <string>

namespace bloomclock {

// Bad parameters: width mismatch, out-of-range pid, invalid experiment config.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Arguments outside an operation's domain (l > q, empty slice, bad GSN range).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Counter overflow or a numerical routine that failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace bloomclock
