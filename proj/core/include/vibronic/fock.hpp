#pragma once

// Molecular Hamiltonian
//     H = Omega sum_{ss'} A_ss' |s><s'| + sum_s h_s |s><s|
// in a truncated product Fock basis: every mode keeps occupations 0..cutoff-1.
// Basis index = node * cutoff^modes + sum_i n_i cutoff^(modes-1-i).
// Coordinates map to ladder operators through x_i = x0 (b_i + b_i^dag)/sqrt2;
// x_i^2 is the projection of the exact square, so the truncated operator is a
// compression of the full one and ground energies are variational in cutoff.

#include <Eigen/Sparse>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "vibronic/lanczos.hpp"
#include "vibronic/vibronic.hpp"

namespace vibronic {

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{2} << 30;

class FockOperator {
 public:
  FockOperator(VibronicModel model, double rabi, int cutoff);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t block_size() const noexcept { return block_; }
  int cutoff() const noexcept { return cutoff_; }
  int modes() const noexcept { return modes_; }
  int nodes() const noexcept { return model_.nodes(); }
  double rabi() const noexcept { return rabi_; }
  const VibronicModel& model() const noexcept { return model_; }

  /// y = H x, matrix free.
  void apply(Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> y) const;

  /// Explicit nonzeros enumerated basis state by basis state (independent of `apply`).
  std::vector<Eigen::Triplet<double>> triplets() const;
  Eigen::SparseMatrix<double> sparse() const;

  std::size_t index_of(int node, std::span<const int> occupations) const;
  std::pair<int, std::vector<int>> describe(std::size_t index) const;

  /// Adds coeff * X_mode x (X = x0 (b + b^dag)/sqrt2) on one node block.
  void add_position(int mode, double coeff, const double* in, double* out) const;
  /// Adds coeff * P X^2 P x.
  void add_position_squared(int mode, double coeff, const double* in, double* out) const;
  /// Adds coeff * P p^2 P x with p conjugate to x.
  void add_momentum_squared(int mode, double coeff, const double* in, double* out) const;

 private:
  VibronicModel model_;
  double rabi_;
  int cutoff_;
  int modes_;
  std::size_t block_;
  std::size_t dim_;
  std::vector<std::size_t> stride_;
  std::vector<double> sqrt_;
  Eigen::VectorXd occupation_;  ///< sum_i n_i per block index
};

/// Bytes needed to hold the Lanczos workspace for this Fock space.
std::size_t estimate_fock_bytes(int nodes, int modes, int cutoff, int krylov_dim = 40);

/// Throws ResourceError when the estimate exceeds `budget_bytes`, and
/// std::invalid_argument for cutoff < 2.
FockOperator build_fock_matrix(const VibronicModel& model, double rabi, int cutoff,
                               std::size_t budget_bytes = kDefaultMemoryBudget);

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXd state;
  double residual = 0.0;
  std::size_t matvecs = 0;
};

GroundState ground_state(const FockOperator& op, double tol = 1e-11);

struct SolveReport {
  double energy = 0.0;
  int cutoff = 0;
  bool converged = false;
  std::vector<std::pair<int, double>> energy_history;
  std::string note;  ///< why the protocol stopped without converging, if it did
  std::string status = "converged";  ///< or "max_cutoff", "memory_budget", "eigensolver"
};

struct ConvergenceOptions {
  double e_tol = 1e-8;
  int max_cutoff = 256;
  int start_cutoff = 4;
  double eig_tol = 1e-11;
  std::size_t budget_bytes = kDefaultMemoryBudget;
};

/// Doubles the cutoff from `start_cutoff` (the last step is clamped to
/// max_cutoff) until successive ground energies agree to e_tol. Running out
/// of cutoff, memory budget or eigensolver iterations is reported, not thrown.
SolveReport converge_cutoff(const VibronicModel& model, double rabi, const ConvergenceOptions& options = {});

struct QuadratureMoments {
  double mean_x = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
};

/// Moments of one mode coordinate (length units) in a normalised state.
QuadratureMoments quadrature_moments(const FockOperator& op, const Eigen::VectorXd& state, int mode);

/// <delta r_k> for every atom, using the model's mode basis.
std::vector<Eigen::Vector3d> mean_atom_displacements(const FockOperator& op, const Eigen::VectorXd& state);

/// max |H_ij - H_ji| over the explicit nonzeros.
double hermiticity_residual(const Eigen::SparseMatrix<double>& h);

/// `row col value` per line, 0-based, %.17g.
void write_coordinate_dump(std::ostream& out, const FockOperator& op);

}  // namespace vibronic
