#include <cmath>
#include <numbers>

#include "doctest.h"
#include "vibronic/analytic.hpp"
#include "vibronic/errors.hpp"

using namespace vibronic;

TEST_CASE("Bogoliubov parameter") {
  const BogoliubovSolution a = bogoliubov_w(1.0, 0.25);
  CHECK(a.exists);
  CHECK(a.w == doctest::Approx(3.0 - std::sqrt(8.0)));
  CHECK(a.omega_tilde == doctest::Approx(std::sqrt(2.0)));
  const BogoliubovSolution z = bogoliubov_w(1.0, 0.0);
  CHECK(z.w == 0.0);
  CHECK(z.omega_tilde == 1.0);
  CHECK_FALSE(bogoliubov_w(1.0, -0.25).exists);
  CHECK_FALSE(bogoliubov_w(1.0, -0.3).exists);
  for (double xi : {-0.2499, -0.2, -1e-9, 1e-9, 0.1, 3.0}) {
    const BogoliubovSolution s = bogoliubov_w(2.0, 2.0 * xi);
    CHECK(s.omega_tilde == doctest::Approx(2.0 * std::sqrt(1.0 + 4.0 * xi)).epsilon(1e-12));
    CHECK(std::abs(s.w) < 1.0);
  }
  // Small couplings keep full relative precision.
  CHECK(bogoliubov_w(1.0, 1e-12).w == doctest::Approx(1e-12).epsilon(1e-9));
}

TEST_CASE("critical points and reduced couplings") {
  const CriticalPoints c = critical_points(1.0, 0.1);
  CHECK(c.xi_c == doctest::Approx(-0.25));
  CHECK(c.kappa_c == doctest::Approx(-1.0 / (0.2 * std::sqrt(2.0))));
  CHECK(xi_bar(-0.125, 1.0) == doctest::Approx(0.5));
  CHECK(kappa_bar(c.kappa_c, 1.0, 0.1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(critical_points(1.0, 0.0), DomainError);
}

TEST_CASE("closed-form branches agree with the Gaussian oracle") {
  // Dumbbell pair: one mode with linear 2 kappa/x0 and coupling 2 xi/x0^2.
  for (double kappa : {0.0, 0.3, -0.7}) {
    for (double xi : {-0.2, 0.0, 0.4}) {
      QuadraticVibronic f;
      f.linear = Eigen::VectorXd::Constant(1, 2.0 * kappa);
      f.coupling = Eigen::MatrixXd::Constant(1, 1, 2.0 * xi);
      f.trap = 0.5;
      CHECK(epsilon2(kappa, xi, 1.0) == doctest::Approx(harmonic_ground_energy(f, 1.0)).epsilon(1e-13));
    }
  }
  const double e2 = epsilon2(-0.4, -0.05, 1.0);
  CHECK(epsilon3(-0.4, -0.05, 1.0, 0.1) == doctest::Approx(e2 + 0.5 * (std::sqrt(1 - kappa_bar(-0.4, 1.0, 0.1)) - 1)));
  CHECK(epsilon4(-0.4, -0.05, 1.0, 0.1) == doctest::Approx(e2 + std::sqrt(1 - kappa_bar(-0.4, 1.0, 0.1)) - 1));
  CHECK(quantum_correction(-0.4, -0.05, 1.0, 0.1) ==
        doctest::Approx(0.5 * (std::sqrt(0.8) + std::sqrt(1 - kappa_bar(-0.4, 1.0, 0.1)) - 2)));
}

TEST_CASE("instabilities are distinguished from the boundary") {
  CHECK_THROWS_AS(epsilon2(0.1, -0.25, 1.0), CriticalBoundaryError);
  CHECK_THROWS_AS(epsilon2(0.1, -0.3, 1.0), InstabilityError);
  const double kc = critical_points(1.0, 0.1).kappa_c;
  CHECK_THROWS_AS(epsilon4(kc, 0.0, 1.0, 0.1), CriticalBoundaryError);
  CHECK_THROWS_AS(epsilon3(1.1 * kc, 0.0, 1.0, 0.1), InstabilityError);
}

TEST_CASE("Wigner function") {
  for (double w : {0.0, 0.3, -0.3, 0.9, -0.9}) {
    const WignerWidths wb = wigner_widths(w);
    CHECK(wb.plus * wb.minus == doctest::Approx(4.0).epsilon(1e-12));
  }
  CHECK(wigner(0.0, 0.0) == doctest::Approx(2.0 / std::numbers::pi));
  CHECK(wigner_displaced(0.4, {1.0, 0.5}, {1.0, 0.5}) == doctest::Approx(2.0 / std::numbers::pi));
  CHECK(wigner(0.5, {0.3, 0.0}) == doctest::Approx(2.0 / std::numbers::pi * std::exp(-6.0 * 0.09)));
  CHECK_THROWS_AS(wigner_widths(1.0), DomainError);
}

TEST_CASE("classical minimum of a quadratic form") {
  QuadraticVibronic f;
  f.constant = 0.5;
  f.linear = Eigen::Vector2d(1.0, -2.0);
  f.coupling = Eigen::Matrix2d{{0.5, 0.1}, {0.1, 0.0}};
  f.trap = 0.5;
  const ClassicalMinimum m = classical_minimum(f);
  CHECK(f.gradient(m.position).norm() < 1e-12);
  CHECK(f.energy(m.position) == doctest::Approx(m.energy));
  f.coupling(1, 1) = -0.6;
  CHECK_THROWS_AS(classical_minimum(f), InstabilityError);
}
