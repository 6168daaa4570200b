#pragma once

#include <stdexcept>
#include <string>

namespace cfqkd {

/// Raised when a parameter is outside its admissible range. Carries the
/// offending field name so front ends can report it.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A ratio against a zero baseline probability was requested.
class DegenerateBaseline : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace cfqkd
