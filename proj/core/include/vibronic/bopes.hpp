#pragma once

// Born-Oppenheimer surfaces: displacements are classical numbers q (reduced
// mode coordinates, length units) and E_BO(Omega; q) is the lowest eigenvalue
// of M(q) = Omega A + diag(E_s(q)).

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vibronic/fock.hpp"
#include "vibronic/geometry.hpp"
#include "vibronic/graph.hpp"
#include "vibronic/vibronic.hpp"

namespace vibronic {

struct BoSurface {
  VibronicModel model;
  double rabi = 0.0;
  std::vector<ElectronicConfig> nodes;  ///< optional labels, same order as model.forms
  std::optional<Geometry> geometry;     ///< needed to name the bond directions

  int dim() const noexcept { return model.modes(); }
  BoSurface at_rabi(double rabi_value) const;
};

BoSurface make_bo_surface(const VibronicModel& model, double rabi, const ResonantGraph& graph,
                          const Geometry& geometry);

struct BoLevel {
  double energy = 0.0;
  double gap = 0.0;  ///< to the next electronic level
  Eigen::VectorXd electronic;
  int dominant_node = 0;
};

/// Smallest eigenvalue of M(q). Throws std::invalid_argument on a dimension mismatch.
double bo_energy(const BoSurface& surface, const Eigen::VectorXd& q);
BoLevel bo_level(const BoSurface& surface, const Eigen::VectorXd& q);

/// Hellmann-Feynman gradient sum_s |c_s|^2 grad E_s(q).
Eigen::VectorXd bo_gradient(const BoSurface& surface, const Eigen::VectorXd& q);

struct BoMinimum {
  Eigen::VectorXd q;
  double energy = 0.0;
  int basin = 0;
  int dominant_node = 0;
  bool converged = false;
};

struct MinimaReport {
  std::vector<BoMinimum> minima;  ///< sorted by energy
  int degeneracy = 0;             ///< minima within degeneracy_tol of the lowest
  double global_energy = 0.0;
  int starts = 0;
};

struct MinimizeOptions {
  double box = 3.0;              ///< half-width in units of x0
  double tol_q = 1e-4;           ///< basin distance in units of x0
  double degeneracy_tol = 1e-8;  ///< in units of omega
  double f_tol = 1e-15;          ///< in units of omega
  double x_tol = 1e-9;           ///< in units of x0
  int max_evals = 40000;
  int threads = 1;
  std::vector<Eigen::VectorXd> extra_starts;
};

/// Deterministic start grid: +-box/2 on every axis, then two radii along the
/// diagonal of every sign sector (sampled deterministically above 10 modes).
std::vector<Eigen::VectorXd> bo_start_grid(int dim, double x0, double box);

MinimaReport minimize_bo(const BoSurface& surface, const MinimizeOptions& options = {});

struct QuadraticFit {
  double radius = 0.0;  ///< stencil radius actually used
  int refinements = 0;  ///< radius halvings forced by level crossings
  double value = 0.0;
  Eigen::VectorXd gradient;  ///< at the centre
  Eigen::MatrixXd quadratic;  ///< E ~ value + gradient.dq + dq^T quadratic dq
  double fit_rms = 0.0;
  int node = 0;

  Eigen::VectorXd parallel;  ///< bond elongation of the excited pair, reduced coords
  double parallel_norm = 0.0;  ///< length of that vector inside the mode space
  double parallel_coeff = 0.0;
  double linear_parallel_at_origin = 0.0;  ///< d/dq_par of the fit extended to q = 0
  Eigen::VectorXd perpendicular;
  double perpendicular_coeff = 0.0;
  std::vector<double> other_coeffs;
};

/// Least-squares quadratic fit on a +-radius stencil around `center`.
/// Requires a geometry and node labels on the surface, and a node with exactly
/// two excitations dominating at the centre.
QuadraticFit bo_quadratic_check(const BoSurface& surface, const Eigen::VectorXd& center,
                                double radius = 1e-2);

struct TransitionOptions {
  MinimizeOptions minimize;
  bool quantum = true;
  ConvergenceOptions convergence;
  int refine_samples = 32;
};

struct TransitionPoint {
  double rabi = 0.0;
  double e_bo = 0.0;
  Eigen::VectorXd q_bo;
  int bo_degeneracy = 0;
  std::optional<double> e_quantum;
  bool quantum_converged = false;
  int quantum_cutoff = 0;
  std::optional<double> e_analytic;
};

struct TransitionScan {
  std::vector<TransitionPoint> points;
  std::size_t kink_index = 0;
  double kink_rabi = 0.0;
  double kink_uncertainty = 0.0;
  double bo_max_second_difference = 0.0;
  double quantum_max_second_difference = 0.0;
};

/// BO global minimum (and optionally the exact ground energy) on a uniform
/// Omega grid of at least 32 samples. The kink is the argmax of the BO second
/// difference, refined once on a finer grid spanning the neighbouring samples.
TransitionScan transition_scan(const BoSurface& surface, const std::vector<double>& rabi_grid,
                               const TransitionOptions& options = {});

/// Omega = 0 minimum of the surface: lowest classical minimum over nodes.
double bo_analytic_minimum(const BoSurface& surface);

void write_surface_csv(std::ostream& out, const BoSurface& surface, const std::vector<Eigen::VectorXd>& points);
void write_transition_csv(std::ostream& out, const TransitionScan& scan);

}  // namespace vibronic
