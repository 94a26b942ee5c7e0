#pragma once

#include <stdexcept>
#include <string>

namespace morphalign {

/// Process exit status reported by the command-line tool for each error family.
enum class ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kData = 2,
  kNumerical = 3,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

/// Bad flags, invalid configuration values, or an impossible training budget.
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kUsage; }
};

/// Malformed or empty input data (empty join, empty parallel corpus, unknown form).
class DataError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kData; }
};

/// Unreadable or unwritable files and streams.
class IoError : public DataError {
 public:
  using DataError::DataError;
};

/// EM produced a zero normalizer, or a statistic is undefined for its input.
class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kNumerical; }
};

}  // namespace morphalign
