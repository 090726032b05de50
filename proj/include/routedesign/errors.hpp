#pragma once

#include <stdexcept>
#include <string>

namespace routedesign {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad indices, dimension mismatches, violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Numerical failures. The CLI maps these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NegativeCycle : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class Unreachable : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class Infeasible : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class BrokenPath : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NotSymmetric : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class Overflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotConverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularJacobian : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace routedesign
