#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kelm {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid hyperparameters, flags or classifier/Laplacian combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or malformed input data (CSV, model, manifest files).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Elimination met a pivot below the singularity tolerance.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, std::size_t column)
      : Error(what), column_(column) {}

  /// Zero-based column whose pivot fell below tolerance.
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

}  // namespace kelm
