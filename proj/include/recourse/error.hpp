#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace recourse {

// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a shape/configuration precondition.
class SpecError : public Error {
 public:
  using Error::Error;
};

// A computation produced NaN or infinity.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Feature names or counts do not match the schema.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what, std::string feature = {})
      : Error(what), feature_(std::move(feature)) {}
  const std::string& feature() const noexcept { return feature_; }

 private:
  std::string feature_;
};

// Malformed textual input (CSV cell, JSON value).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

// Model file is corrupt or has an unexpected layout.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::string field)
      : Error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class MeasurementError : public Error {
 public:
  using Error::Error;
};

}  // namespace recourse
