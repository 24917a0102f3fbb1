#pragma once

#include <stdexcept>
#include <string>

namespace simcmp {

/// Broad failure classes. Each maps onto one CLI exit code.
enum class ErrorKind {
  kUsage,   // bad invocation or precondition violated by the caller
  kConfig,  // run configuration is inconsistent or incomplete
  kData,    // input content is malformed or fails validation
  kIo,      // a file could not be opened, read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

// Specific data errors, so callers and tests can tell them apart.

/// A required column or key is absent.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

/// A row violates a record invariant (label range, duplicate id, empty text).
class ValidationError : public DataError {
 public:
  ValidationError(std::size_t row, const std::string& what)
      : DataError(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Fewer than two usable records or samples.
class TooSmallError : public DataError {
 public:
  using DataError::DataError;
};

/// A binary or text exchange file does not follow its layout.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

/// Vectors or sample lists whose sizes must agree do not.
class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

/// An embedding or score file covers too few dataset records.
class CoverageError : public DataError {
 public:
  using DataError::DataError;
};

/// Exit code contract: 0 ok, 2 usage/config, 3 data/format, 4 I/O.
inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kUsage:
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kData:
      return 3;
    case ErrorKind::kIo:
      return 4;
  }
  return 1;
}

}  // namespace simcmp
