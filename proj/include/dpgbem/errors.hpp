#pragma once

#include <stdexcept>
#include <string>

namespace dpgbem {

/// Invalid or unsupported configuration (unknown domain, bad degree, diam >= 1, ...).
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the admissible range of an operation.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure that signals a broken invariant (non-SPD Gram matrix, ...).
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear solver failure; carries the last residual seen.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (relative residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace dpgbem
