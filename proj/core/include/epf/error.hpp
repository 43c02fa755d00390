#pragma once

#include <stdexcept>
#include <string>

namespace epf {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CSV schema, gaps, bad values).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or out-of-range parameter.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Not enough history before a target day.
class HistoryError : public Error {
 public:
  using Error::Error;
};

/// Least-squares design is numerically rank deficient.
class SingularDesignError : public Error {
 public:
  using Error::Error;
};

}  // namespace epf
