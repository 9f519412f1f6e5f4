#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

/// Argument outside the range an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A simple-pole formula was asked for a double pole, or the reverse.
class MultiplicityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Adaptive precision hit its ceiling without passing the acceptance checks.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double residual, long precision_bits)
      : std::runtime_error(what), residual_(residual), precision_bits_(precision_bits) {}

  double residual() const noexcept { return residual_; }
  long precision_bits() const noexcept { return precision_bits_; }

 private:
  double residual_;
  long precision_bits_;
};

/// The ODE oracle could not advance (step underflow or step budget exhausted).
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double achieved_tau)
      : std::runtime_error(what), achieved_tau_(achieved_tau) {}

  /// Dimensionless time Γt reached before the failure.
  double achieved_tau() const noexcept { return achieved_tau_; }

 private:
  double achieved_tau_;
};

}  // namespace dicke
