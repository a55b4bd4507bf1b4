#pragma once

#include <stdexcept>
#include <string>

namespace qmeas {

// Bad input: violated preconditions, malformed records or configs.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The numbers went wrong: unstable step, lost positivity, quadrature did not converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qmeas
