#include "vibronic/analytic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vibronic/errors.hpp"

namespace vibronic {

namespace {

// sqrt(1 - bar) with the distinct errors at and beyond criticality.
double stable_root(double bar, const char* what) {
  if (bar == 1.0) throw CriticalBoundaryError(std::string(what) + " sits exactly at its critical value");
  if (bar > 1.0) throw InstabilityError(std::string(what) + " is beyond its critical value");
  return std::sqrt(1.0 - bar);
}

}  // namespace

BogoliubovSolution bogoliubov_w(double omega, double xi_eff) {
  if (!(omega > 0.0)) throw DomainError("omega must be positive");
  BogoliubovSolution out;
  if (xi_eff == 0.0) {
    out.w = 0.0;
    out.omega_tilde = omega;
    out.exists = true;
    return out;
  }
  if (xi_eff <= -omega / 4.0) return out;

  // w = 1 + phi - sgn(phi) sqrt((1 + phi)^2 - 1), rationalised so that small
  // |xi_eff| (large |phi|) does not cancel.
  const double phi = omega / (2.0 * xi_eff);
  const double sign = phi > 0.0 ? 1.0 : -1.0;
  const double a = std::abs(1.0 + phi);
  out.w = sign / (a + std::sqrt(a * a - 1.0));
  out.omega_tilde = omega * (1.0 + out.w) / (1.0 - out.w);
  out.exists = std::abs(out.w) < 1.0;
  return out;
}

double perpendicular_xi(double kappa, double nu) { return nu * kappa / std::sqrt(2.0); }

CriticalPoints critical_points(double omega, double nu) {
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  return CriticalPoints{-omega / 4.0, -omega / (2.0 * std::sqrt(2.0) * nu)};
}

double xi_bar(double xi, double omega) { return xi / (-omega / 4.0); }

double kappa_bar(double kappa, double omega, double nu) { return kappa / critical_points(omega, nu).kappa_c; }

double epsilon2(double kappa, double xi, double omega) {
  const double root = stable_root(xi_bar(xi, omega), "xi");
  const double k = kappa / omega;
  return -2.0 * k * k / (root * root) + 0.5 * root - 0.5;
}

double epsilon4(double kappa, double xi, double omega, double nu) {
  const double perp = stable_root(kappa_bar(kappa, omega, nu), "kappa");
  return epsilon2(kappa, xi, omega) + perp - 1.0;
}

double epsilon3(double kappa, double xi, double omega, double nu) {
  const double perp = stable_root(kappa_bar(kappa, omega, nu), "kappa");
  return epsilon2(kappa, xi, omega) + 0.5 * (perp - 1.0);
}

WignerWidths wigner_widths(double w) {
  if (!(std::abs(w) < 1.0)) throw DomainError("wigner needs |w| < 1");
  return WignerWidths{2.0 * (1.0 + w) / (1.0 - w), 2.0 * (1.0 - w) / (1.0 + w)};
}

double wigner(double w, std::complex<double> alpha) { return wigner_displaced(w, alpha, 0.0); }

double wigner_displaced(double w, std::complex<double> alpha, std::complex<double> alpha0) {
  const WignerWidths wb = wigner_widths(w);
  const std::complex<double> a = alpha - alpha0;
  return 2.0 / std::numbers::pi * std::exp(-wb.plus * a.real() * a.real() - wb.minus * a.imag() * a.imag());
}

double quantum_correction(double kappa, double xi, double omega, double nu) {
  const double par = stable_root(xi_bar(xi, omega), "xi");
  const double perp = stable_root(kappa_bar(kappa, omega, nu), "kappa");
  return 0.5 * omega * (par + perp - 2.0);
}

ClassicalMinimum classical_minimum(const QuadraticVibronic& form) {
  const Eigen::MatrixXd k = form.quadratic();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  if (k.size() > 0 && eig.eigenvalues().minCoeff() <= 0.0) {
    throw InstabilityError("quadratic form '" + form.label + "' is not positive definite");
  }
  ClassicalMinimum out;
  out.position = k.size() > 0 ? Eigen::VectorXd(-0.5 * k.ldlt().solve(form.linear)) : Eigen::VectorXd();
  out.energy = form.constant + 0.5 * form.linear.dot(out.position);
  return out;
}

double harmonic_ground_energy(const QuadraticVibronic& form, double omega) {
  const ClassicalMinimum min = classical_minimum(form);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(form.quadratic(), Eigen::EigenvaluesOnly);
  double zero_point = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    zero_point += 0.5 * omega * (std::sqrt(eig.eigenvalues()(i) / form.trap) - 1.0);
  }
  return min.energy + zero_point;
}

}  // namespace vibronic
