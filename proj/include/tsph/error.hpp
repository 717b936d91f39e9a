#pragma once

#include <stdexcept>
#include <string>

namespace tsph {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV rows, JSON documents).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented invariant or precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Tied extreme values where distinct ones are required.
class NonGenericError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A constant series carries no sublevel-set structure.
class ConstantSeriesError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A function does not cross the span of an interval or automaton.
class CrossingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A path-weight series does not converge at the evaluation point.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace tsph
