#pragma once

#include <stdexcept>
#include <string>

namespace phasescope {

/// Base for all library failures. Input-type errors map to CLI exit code 3,
/// NumericalError to exit code 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Raised when a point mass reaches a code path that needs samples.
class UnsupportedSampling : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace phasescope
