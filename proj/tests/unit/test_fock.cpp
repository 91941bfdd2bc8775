#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "vibronic/analytic.hpp"
#include "vibronic/errors.hpp"
#include "vibronic/fock.hpp"

using namespace vibronic;

namespace {

VibronicModel coupled_two_mode() {
  QuadraticVibronic f;
  f.label = "toy";
  f.constant = 0.1;
  f.linear = Eigen::Vector2d(0.3, -0.2);
  f.coupling = Eigen::Matrix2d{{0.05, -0.08}, {-0.08, -0.1}};
  f.trap = 0.5;
  VibronicModel m;
  m.hopping = Eigen::MatrixXd::Zero(1, 1);
  m.forms = {f};
  return m;
}

}  // namespace

TEST_CASE("matrix-free apply equals the explicit triplet enumeration") {
  const auto tri = testing::build(Preset::Triangle, -0.4, -0.05, 0.1);
  const FockOperator op(tri.model, 0.3, 4);
  CHECK(op.dim() == 6u * 256u);
  const Eigen::SparseMatrix<double> h = op.sparse();
  CHECK(hermiticity_residual(h) < 1e-14);
  const Eigen::VectorXd x = deterministic_start(op.dim(), 11);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.dim()));
  op.apply(x, y);
  CHECK((y - h * x).norm() < 1e-12 * y.norm());
}

TEST_CASE("basis indexing round trip") {
  const auto tri = testing::build(Preset::Triangle, -0.4, -0.05, 0.1);
  const FockOperator op(tri.model, 0.0, 5);
  const std::vector<int> occ{4, 0, 2, 1};
  const std::size_t i = op.index_of(3, occ);
  CHECK(i == 3u * 625u + 4u * 125u + 0u + 2u * 5u + 1u);
  const auto [node, back] = op.describe(i);
  CHECK(node == 3);
  CHECK(back == occ);
}

TEST_CASE("quadratic ground energy matches the Gaussian oracle") {
  const VibronicModel m = coupled_two_mode();
  ConvergenceOptions o;
  o.max_cutoff = 64;
  const SolveReport r = converge_cutoff(m, 0.0, o);
  CHECK(r.converged);
  CHECK(r.status == "converged");
  CHECK(r.energy == doctest::Approx(harmonic_ground_energy(m.forms[0], 1.0)).epsilon(1e-9));
  for (std::size_t i = 1; i < r.energy_history.size(); ++i) {
    CHECK(r.energy_history[i].second <= r.energy_history[i - 1].second + 1e-12);
  }
}

TEST_CASE("ground-state quadratures of the trap") {
  QuadraticVibronic f;
  f.linear = Eigen::VectorXd::Zero(1);
  f.coupling = Eigen::MatrixXd::Zero(1, 1);
  f.trap = 0.5 / (0.7 * 0.7);
  VibronicModel m;
  m.hopping = Eigen::MatrixXd::Zero(1, 1);
  m.forms = {f};
  m.x0 = 0.7;
  const FockOperator op(m, 0.0, 8);
  const GroundState gs = ground_state(op);
  CHECK(gs.energy == doctest::Approx(0.0).epsilon(1e-12));
  const QuadratureMoments q = quadrature_moments(op, gs.state, 0);
  CHECK(q.mean_x == doctest::Approx(0.0));
  CHECK(q.var_x == doctest::Approx(0.49 / 2));
  CHECK(q.var_p == doctest::Approx(1.0 / (2 * 0.49)));
}

TEST_CASE("displaced pair mode moves the atoms apart along the bond") {
  const PhysicalParams p = PhysicalParams::from_nu(1.0, 1.0, 0.1);
  const VibronicModel m = single_node_model(dumbbell_hamiltonian(p, Couplings{-0.3, 0.0, 0.1, 1.0}), 1);
  const FockOperator op(m, 0.0, 24);
  const GroundState gs = ground_state(op);
  const auto disp = mean_atom_displacements(op, gs.state);
  // q* = -2 kappa x0 / omega = 0.6, each atom moves q*/sqrt2.
  CHECK(disp[1].x() == doctest::Approx(0.6 / std::sqrt(2.0)).epsilon(1e-8));
  CHECK(disp[0].x() == doctest::Approx(-0.6 / std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("resource accounting") {
  const auto tet = testing::build(Preset::Tetrahedron, -0.4, -0.05, 0.1);
  CHECK(estimate_fock_bytes(10, 9, 8) > estimate_fock_bytes(10, 9, 4));
  CHECK_THROWS_AS(build_fock_matrix(tet.model, 0.1, 16), ResourceError);
  CHECK_THROWS_AS(build_fock_matrix(tet.model, 0.1, 1), std::invalid_argument);
  ConvergenceOptions o;
  o.max_cutoff = 16;
  o.budget_bytes = 1 << 20;
  const SolveReport r = converge_cutoff(tet.model, 0.1, o);
  CHECK_FALSE(r.converged);
  CHECK(r.status == "memory_budget");
}

TEST_CASE("coordinate dump lists every nonzero") {
  const PhysicalParams p = PhysicalParams::from_nu(1.0, 1.0, 0.1);
  const FockOperator op(dumbbell_hamiltonian(p, Couplings{-0.3, 0.05, 0.1, 1.0}), 0.2, 6);
  std::ostringstream out;
  write_coordinate_dump(out, op);
  std::size_t lines = 0;
  for (char c : out.str()) lines += c == '\n';
  CHECK(lines == static_cast<std::size_t>(op.sparse().nonZeros()));
}
