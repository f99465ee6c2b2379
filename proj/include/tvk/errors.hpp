#pragma once

#include <stdexcept>
#include <string>

namespace tvk {

/// Argument outside the mathematical domain (e.g. a negative jump size).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Argument outside a tabulated range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Input violates a documented invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A penalty failed to produce positive certification constants.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request was refused because it exceeds a configured resource bound.
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace tvk
