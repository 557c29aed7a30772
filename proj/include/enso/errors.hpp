#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace enso {

// Base class for all library errors so callers can catch one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Unknown model variant, unknown unit quantity, unknown variable name.
class CatalogError : public Error {
 public:
  using Error::Error;
};

// Shape or alignment mismatch between inputs.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values (dt <= 0, bad policy parameters, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite state during SDE integration; carries time and state.
class IntegrationBlowupError : public Error {
 public:
  IntegrationBlowupError(const std::string& msg, double time,
                         std::vector<double> state)
      : Error(msg), time(time), state(std::move(state)) {}
  double time;
  std::vector<double> state;
};

// Covariance not positive definite after regularization; names the columns
// involved so the caller can spot collinear candidates.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& msg, std::vector<std::string> columns)
      : Error(msg), columns(std::move(columns)) {}
  std::vector<std::string> columns;
};

// Record too short for a statistically meaningful estimate.
class DataLengthError : public Error {
 public:
  using Error::Error;
};

// CSV / JSON parse failures; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg, long line = -1)
      : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line(line) {}
  long line;
};

}  // namespace enso
