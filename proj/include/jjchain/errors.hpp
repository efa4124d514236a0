#pragma once

#include <stdexcept>
#include <string>

namespace jjchain {

/// Argument outside the mathematical domain of an operation (k = 0, negative occupation, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Structurally invalid input: mismatched grids, non-monotone tables, wrong array lengths.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Config file that fails to parse or violates the schema; the message names the location.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or singular arithmetic encountered while evaluating a model.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver hit its step cap.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double last_residual, long steps)
      : NumericError(what), last_residual_(last_residual), steps_(steps) {}
  double last_residual() const { return last_residual_; }
  long steps() const { return steps_; }

 private:
  double last_residual_;
  long steps_;
};

/// A least-squares fit could not be set up or did not converge.
class FitError : public NumericError {
 public:
  FitError(const std::string& what, double last_residual = -1.0)
      : NumericError(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace jjchain
