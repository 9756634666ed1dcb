#pragma once

#include <stdexcept>
#include <string>

namespace arakzar {

/// Malformed or out-of-domain input (bad JSON, violated preconditions).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not reach its target (no bracket, no section found, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A proved identity or inequality failed to hold on computed values.
/// Seeing one of these means an implementation bug, not bad input.
class PropertyViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace arakzar
