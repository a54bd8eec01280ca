#pragma once

#include <stdexcept>
#include <string>

namespace fracdisk {

// Root of every error raised by the library. The CLI maps ConfigError to
// exit code 2 and everything else derived from NumericalError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid or incomplete run configuration (CLI / JSON input).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// An iterative method stopped before reaching its target; `achieved` holds
// the best error estimate that was reached.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : NumericalError(what + " (achieved bound " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// Series summation lost too many digits to cancellation.
class AccuracyLossError : public NumericalError {
 public:
  AccuracyLossError(const std::string& what, double cancellation_ratio)
      : NumericalError(what), ratio_(cancellation_ratio) {}
  double cancellation_ratio() const noexcept { return ratio_; }

 private:
  double ratio_;
};

// A precomputed table or grid does not cover the requested entry.
class CoverageError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Numerical Laplace inversion did not stabilise across term counts.
class InversionError : public NumericalError {
 public:
  InversionError(const std::string& what, double oscillation)
      : NumericalError(what), oscillation_(oscillation) {}
  double oscillation() const noexcept { return oscillation_; }

 private:
  double oscillation_;
};

// A precomputed KernelTable violated one of its structural invariants.
class InvariantError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fracdisk
