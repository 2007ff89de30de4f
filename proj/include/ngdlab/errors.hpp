#pragma once

#include <stdexcept>
#include <string>

namespace ngdlab {

/// Base class for every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values showed up where finite ones are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A factorization or inversion failed because the operand is
/// (numerically) singular or indefinite.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// A dense operation was asked to materialize something larger than the
/// configured cap allows.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An operation was called before its prerequisites were computed,
/// e.g. a backward pass without a forward cache.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unusable input data (CSV contents, empty datasets, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values (non-positive damping, empty grids, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem trouble: unreadable input or unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ngdlab
