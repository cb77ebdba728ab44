#pragma once

#include <stdexcept>
#include <string>

namespace sslab {

/// Rejected input: invalid specification, violated precondition or
/// malformed configuration. Maps to CLI exit code 1.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An eigensolver or integrator did not deliver the required accuracy.
/// Maps to CLI exit code 2.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sslab
