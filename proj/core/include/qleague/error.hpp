#pragma once

#include <stdexcept>
#include <string>

namespace qleague {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction arguments or configuration values.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration text.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A function evaluated outside its domain (e.g. the ratio rule at (0, 0)).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature exhausted its evaluation budget.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : Error(what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// Two computation routes that must agree did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace qleague
