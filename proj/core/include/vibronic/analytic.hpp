#pragma once

// Closed-form results for the Omega = 0 limit. All energies returned by the
// epsilon* functions are in units of omega; everything else carries units.

#include <complex>

#include "vibronic/vibronic.hpp"

namespace vibronic {

struct BogoliubovSolution {
  double w = 0.0;            ///< b_BT = (b + w b^dag)/sqrt(1 - w^2)
  double omega_tilde = 0.0;  ///< omega (1 + w)/(1 - w) = omega sqrt(1 + 4 xi_eff/omega)
  bool exists = false;
};

/// Squeeze parameter of omega b^dag b + xi_eff (b + b^dag)^2. Does not exist
/// for xi_eff <= -omega/4; xi_eff = 0 is the identity (w = 0).
BogoliubovSolution bogoliubov_w(double omega, double xi_eff);

/// Effective quadratic coefficient of the perpendicular modes, nu kappa / sqrt2.
double perpendicular_xi(double kappa, double nu);

struct CriticalPoints {
  double xi_c = 0.0;
  double kappa_c = 0.0;
};

/// xi_c = -omega/4, kappa_c = -omega/(2 sqrt2 nu). Requires nu > 0.
CriticalPoints critical_points(double omega, double nu);

/// xi / xi_c and kappa / kappa_c.
double xi_bar(double xi, double omega);
double kappa_bar(double kappa, double omega, double nu);

/// Dumbbell |uu> branch: -(2 kappa^2/omega^2)/(1 - xi_bar) + sqrt(1 - xi_bar)/2 - 1/2.
/// Throws CriticalBoundaryError at xi_bar == 1, InstabilityError above.
double epsilon2(double kappa, double xi, double omega);

/// Tetrahedron two-excitation branch, adds sqrt(1 - kappa_bar) - 1 for the two
/// perpendicular modes.
double epsilon4(double kappa, double xi, double omega, double nu);

/// Triangle two-excitation branch (one in-plane perpendicular mode).
double epsilon3(double kappa, double xi, double omega, double nu);

/// (2/pi) exp(-wbar_+ a_R^2 - wbar_- a_I^2), wbar_pm = 2 (1 pm w)/(1 mp w).
double wigner(double w, std::complex<double> alpha);

/// Same Gaussian centred on alpha0 (the displaced parallel mode).
double wigner_displaced(double w, std::complex<double> alpha, std::complex<double> alpha0);

struct WignerWidths {
  double plus = 2.0;
  double minus = 2.0;
};
WignerWidths wigner_widths(double w);

/// Ground energy minus BO minimum at Omega = 0:
/// (omega/2)[sqrt(1 - xi_bar) + sqrt(1 - kappa_bar) - 2].
double quantum_correction(double kappa, double xi, double omega, double nu);

/// Exact ground energy of a quadratic vibronic form quantised with the trap
/// as omega b^dag b:  c - l^T K^-1 l / 4 + sum_i (omega_i - omega)/2.
/// Throws InstabilityError if the form is not positive definite.
double harmonic_ground_energy(const QuadraticVibronic& form, double omega);

/// Classical minimum of the form (energy and position).
struct ClassicalMinimum {
  double energy = 0.0;
  Eigen::VectorXd position;
};
ClassicalMinimum classical_minimum(const QuadraticVibronic& form);

}  // namespace vibronic
