#pragma once

#include <stdexcept>
#include <string>

namespace bergman {

/// Invalid arguments, malformed group files or run configurations.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration grew past the configured element cap.
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerically degenerate input to an otherwise well-posed operation
/// (vanishing kernel, finite-difference step underflow, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bergman
