#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gecrb {

// Input data violates a file-format contract. Carries a 1-based line number
// when the offending line is known (0 = unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A caller broke an API precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Unusable run configuration: bad parameter value or missing resource.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gecrb
