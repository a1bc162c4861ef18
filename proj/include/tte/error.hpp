#pragma once

#include <stdexcept>
#include <string>

namespace tte {

/// Bad input: schema violations, out-of-domain arguments, unmet preconditions.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to deliver (step-size underflow, non-convergence, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tte
