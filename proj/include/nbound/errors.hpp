#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace nb {

/// Input outside the domain class the formulas are valid for.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or incomplete configuration (CLI exit status 2).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Base class of every numerical failure (CLI exit status 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An integral or constant that is infinite for the requested parameters.
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Refinement did not reach the requested tolerance.
class PrecisionError : public NumericalError {
 public:
  PrecisionError(const std::string& what, double previous, double last)
      : NumericalError(what), previous_(previous), last_(last) {}
  double previous() const noexcept { return previous_; }
  double last() const noexcept { return last_; }

 private:
  double previous_;
  double last_;
};

/// Iterative solver failed to converge.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : NumericalError(what + " (residual " + format(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }
  double residual_;
};

}  // namespace nb
