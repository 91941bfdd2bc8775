#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace vibronic {

/// y = A x for a real symmetric operator of dimension n.
using SymmetricApply =
    std::function<void(Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> y)>;

struct LanczosOptions {
  double tol = 1e-10;          ///< residual <= tol * max(1, |theta|)
  int krylov_dim = 40;         ///< basis size before a thick restart
  int keep = 6;                ///< Ritz vectors kept across a restart
  std::size_t max_matvec = 0;  ///< 0: 10 sqrt(n) + 500
  std::uint64_t seed = 0x5eedULL;
  std::size_t dense_threshold = 384;  ///< below this dimension, solve densely
};

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  std::size_t matvecs = 0;
};

/// Lowest eigenpair by thick-restart Lanczos with full reorthogonalisation.
/// The start vector is a fixed pseudo-random vector so results do not depend
/// on the symmetry sector of a flat start. Throws ConvergenceError (with the
/// best Ritz value) once max_matvec is exhausted.
EigenPair lowest_eigenpair(const SymmetricApply& apply, std::size_t n, const LanczosOptions& options = {});

/// Deterministic start vector shared by the solver and its tests.
Eigen::VectorXd deterministic_start(std::size_t n, std::uint64_t seed);

}  // namespace vibronic
