#pragma once

#include <stdexcept>
#include <string>

namespace hermrep {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index or parameter outside the supported range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Dimension or truncation-shape mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Sampled data does not line up with the quadrature nodes.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise unusable input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Adaptive search exceeded its hard cap.
class CapError : public Error {
 public:
  using Error::Error;
};

/// Operator application would lose mass above the truncation.
class HeadroomError : public Error {
 public:
  using Error::Error;
};

/// Not enough usable data points for a fit.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant failure (e.g. eigensolver did not converge).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hermrep
