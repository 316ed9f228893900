#pragma once

#include <stdexcept>
#include <string>

namespace equilib {

// Base of every error raised by the library. `kind()` is the stable,
// machine-readable tag used in CLI error objects.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Distance outside the law's support (d <= 0, below a tabulated grid, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain_error", what) {}
};

class NotIntegrable : public Error {
 public:
  explicit NotIntegrable(const std::string& what) : Error("not_integrable", what) {}
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error("invalid_input", what) {}
};

class InvalidPins : public Error {
 public:
  explicit InvalidPins(const std::string& what) : Error("invalid_pins", what) {}
};

class InsufficientEquations : public Error {
 public:
  explicit InsufficientEquations(const std::string& what)
      : Error("insufficient_equations", what) {}
};

class InfeasibleBracket : public Error {
 public:
  explicit InfeasibleBracket(const std::string& what)
      : Error("infeasible_bracket", what) {}
};

// Iteration budget exhausted. Carries the last residual seen.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double last_residual)
      : Error("no_convergence", what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace equilib
