#pragma once

#include <stdexcept>
#include <string>

namespace ghostsim {

/// Invalid arguments or broken invariants (bad grid, mismatched axes, ...).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Errors in user-supplied configuration text. Carries a 1-based line number
/// (0 when the error is not tied to a specific line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ghostsim
