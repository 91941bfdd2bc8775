#include <random>

#include "doctest.h"
#include "vibronic/errors.hpp"
#include "vibronic/lanczos.hpp"

using namespace vibronic;

namespace {

Eigen::MatrixXd random_symmetric(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return 0.5 * (a + a.transpose());
}

SymmetricApply dense(const Eigen::MatrixXd& a) {
  return [&a](Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> y) { y.noalias() = a * x; };
}

}  // namespace

TEST_CASE("lowest eigenpair matches a dense solver") {
  for (int n : {50, 600, 1500}) {
    const Eigen::MatrixXd a = random_symmetric(n, 7u + n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    const EigenPair p = lowest_eigenpair(dense(a), n);
    CHECK(p.value == doctest::Approx(eig.eigenvalues()(0)).epsilon(1e-10));
    CHECK((a * p.vector - p.value * p.vector).norm() < 1e-8 * std::max(1.0, std::abs(p.value)));
    CHECK(p.vector.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("a flat start would miss the ground state of a bipartite ring") {
  // Ring adjacency negated: the ground state alternates in sign and sums to zero.
  const int n = 64;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, (i + 1) % n) = a((i + 1) % n, i) = 1.0;
  const EigenPair p = lowest_eigenpair(dense(a), n);
  CHECK(p.value == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(std::abs(p.vector.sum()) < 1e-6);
}

TEST_CASE("deterministic start and exhausted budgets") {
  CHECK((deterministic_start(100, 1) - deterministic_start(100, 1)).norm() == 0.0);
  CHECK((deterministic_start(100, 1) - deterministic_start(100, 2)).norm() > 0.0);
  const Eigen::MatrixXd a = random_symmetric(800, 3);
  LanczosOptions o;
  o.max_matvec = 10;
  CHECK_THROWS_AS(lowest_eigenpair(dense(a), 800, o), ConvergenceError);
}
