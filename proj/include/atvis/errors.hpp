#pragma once

#include <stdexcept>
#include <string>

namespace atvis {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree, or an image is too small for the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar parameter is outside its admissible range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterate or intermediate quantity became NaN/Inf.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, written, or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace atvis
