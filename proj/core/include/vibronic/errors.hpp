#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vibronic {

/// Argument outside the mathematical domain of an operation (r <= 0, |w| >= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation requested on a potential variant that cannot provide it.
class UnsupportedVariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Quadratic vibrational Hamiltonian is unbounded below for the requested couplings.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Couplings sit exactly on a critical point (xi_bar == 1 or kappa_bar == 1).
class CriticalBoundaryError : public InstabilityError {
 public:
  using InstabilityError::InstabilityError;
};

/// A requested Fock space does not fit into the configured memory budget.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t estimated_bytes)
      : std::runtime_error(what), estimated_bytes_(estimated_bytes) {}

  std::size_t estimated_bytes() const noexcept { return estimated_bytes_; }

 private:
  std::size_t estimated_bytes_;
};

/// Iterative eigensolver hit its iteration cap; carries the best estimate so far.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double residual)
      : std::runtime_error(what), best_estimate_(best_estimate), residual_(residual) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double residual() const noexcept { return residual_; }

 private:
  double best_estimate_;
  double residual_;
};

/// Inconsistent sizes or geometry (coincident atoms, dimension mismatch).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace vibronic
