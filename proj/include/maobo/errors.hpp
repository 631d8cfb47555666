#pragma once

#include <stdexcept>
#include <string>

namespace maobo {

enum class ErrorCode {
  InvalidInput,
  DimensionMismatch,
  Numerical,
  UnsupportedDimension,
  Config,
  Io,
  RunFailed,
};

/// Base exception for every failure raised by the library. The code maps
/// one-to-one onto the C API status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(ErrorCode::InvalidInput, what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(ErrorCode::DimensionMismatch, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCode::Numerical, what) {}
};

class UnsupportedDimension : public Error {
 public:
  explicit UnsupportedDimension(const std::string& what)
      : Error(ErrorCode::UnsupportedDimension, what) {}
};

/// Configuration parse or validation failure. `line` is 0 when the problem is
/// not tied to a particular line (e.g. a missing required key).
class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, std::string field, const std::string& what)
      : Error(ErrorCode::Config, format(line, field, what)), line_(line), field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(std::size_t line, const std::string& field, const std::string& what) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += field + ": ";
    return out + what;
  }

  std::size_t line_;
  std::string field_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

}  // namespace maobo
