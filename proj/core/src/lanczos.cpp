#include "vibronic/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "vibronic/errors.hpp"

namespace vibronic {

Eigen::VectorXd deterministic_start(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  // Bit-level conversion keeps the stream identical across standard libraries.
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  return v.normalized();
}

namespace {

EigenPair dense_lowest(const SymmetricApply& apply, Eigen::Index n) {
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd col(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    apply(e, col);
    a.col(j) = col;
    e(j) = 0.0;
  }
  a = 0.5 * (a + a.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  EigenPair out;
  out.value = eig.eigenvalues()(0);
  out.vector = eig.eigenvectors().col(0);
  out.residual = (a * out.vector - out.value * out.vector).norm();
  out.matvecs = static_cast<std::size_t>(n);
  return out;
}

}  // namespace

EigenPair lowest_eigenpair(const SymmetricApply& apply, std::size_t n_in, const LanczosOptions& options) {
  if (n_in == 0) throw std::invalid_argument("eigensolver called on an empty operator");
  const auto n = static_cast<Eigen::Index>(n_in);
  if (n_in <= options.dense_threshold) return dense_lowest(apply, n);

  const std::size_t max_matvec =
      options.max_matvec > 0 ? options.max_matvec
                             : static_cast<std::size_t>(10.0 * std::sqrt(static_cast<double>(n)) + 500.0);
  const Eigen::Index m = std::min<Eigen::Index>(std::max(options.krylov_dim, 8), n);
  const Eigen::Index keep = std::clamp<Eigen::Index>(options.keep, 1, m - 2);

  Eigen::MatrixXd basis(n, m);
  Eigen::MatrixXd projected = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd w(n);
  Eigen::VectorXd residual(n);
  std::size_t matvecs = 0;

  basis.col(0) = deterministic_start(n_in, options.seed);
  apply(basis.col(0), w);
  ++matvecs;
  projected(0, 0) = basis.col(0).dot(w);
  residual = w - projected(0, 0) * basis.col(0);
  residual -= basis.col(0).dot(residual) * basis.col(0);
  Eigen::Index filled = 1;

  double best_value = projected(0, 0);
  double best_residual = residual.norm();

  for (;;) {
    bool invariant = false;
    Eigen::Index since_check = 0;
    while (filled < m && matvecs < max_matvec) {
      const double beta = residual.norm();
      const double scale = std::max(1.0, projected.topLeftCorner(filled, filled).cwiseAbs().maxCoeff());
      if (beta <= 1e-14 * scale) {
        invariant = true;
        break;
      }
      Eigen::VectorXd v = residual / beta;
      for (int pass = 0; pass < 2; ++pass) {
        v -= basis.leftCols(filled) * (basis.leftCols(filled).transpose() * v);
      }
      v.normalize();
      basis.col(filled) = v;

      apply(basis.col(filled), w);
      ++matvecs;
      const Eigen::Index cols = filled + 1;
      Eigen::VectorXd h = basis.leftCols(cols).transpose() * w;
      residual = w - basis.leftCols(cols) * h;
      const Eigen::VectorXd h2 = basis.leftCols(cols).transpose() * residual;
      residual -= basis.leftCols(cols) * h2;
      h += h2;
      for (Eigen::Index i = 0; i < cols; ++i) projected(i, filled) = projected(filled, i) = h(i);
      filled = cols;

      if (++since_check >= 8 && filled < m) {
        since_check = 0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(projected.topLeftCorner(filled, filled));
        const double theta = eig.eigenvalues()(0);
        const double res = residual.norm() * std::abs(eig.eigenvectors()(filled - 1, 0));
        if (res <= options.tol * std::max(1.0, std::abs(theta))) break;
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(projected.topLeftCorner(filled, filled));
    const Eigen::VectorXd& theta = eig.eigenvalues();
    const Eigen::MatrixXd& y = eig.eigenvectors();
    const double res = invariant ? 0.0 : residual.norm() * std::abs(y(filled - 1, 0));
    best_value = theta(0);
    best_residual = res;

    if (res <= options.tol * std::max(1.0, std::abs(theta(0)))) {
      EigenPair out;
      out.value = theta(0);
      out.vector = basis.leftCols(filled) * y.col(0);
      out.vector.normalize();
      out.residual = res;
      out.matvecs = matvecs;
      return out;
    }
    if (matvecs >= max_matvec) {
      throw ConvergenceError("Lanczos did not converge within " + std::to_string(max_matvec) +
                                 " matrix-vector products",
                             best_value, best_residual);
    }

    // Thick restart: keep the lowest Ritz vectors; their couplings to the
    // next Krylov vector are recovered by the full projection above.
    const Eigen::Index k = std::min(keep, filled - 1);
    const Eigen::MatrixXd kept = basis.leftCols(filled) * y.leftCols(k);
    basis.leftCols(k) = kept;
    projected.setZero();
    for (Eigen::Index i = 0; i < k; ++i) projected(i, i) = theta(i);
    filled = k;
  }
}

}  // namespace vibronic
