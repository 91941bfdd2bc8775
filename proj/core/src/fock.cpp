#include "vibronic/fock.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "vibronic/errors.hpp"

namespace vibronic {

namespace {

constexpr double kZero = 1e-300;

std::size_t checked_power(int base, int exponent) {
  std::size_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (out > (std::size_t{1} << 52) / static_cast<std::size_t>(base)) {
      throw ResourceError("Fock space dimension overflows", static_cast<std::size_t>(-1));
    }
    out *= static_cast<std::size_t>(base);
  }
  return out;
}

}  // namespace

FockOperator::FockOperator(VibronicModel model, double rabi, int cutoff)
    : model_(std::move(model)), rabi_(rabi), cutoff_(cutoff), modes_(model_.modes()) {
  if (cutoff < 2) throw std::invalid_argument("Fock cutoff must be at least 2");
  if (model_.nodes() == 0) throw std::invalid_argument("model has no electronic nodes");
  if (model_.hopping.rows() != model_.nodes() || model_.hopping.cols() != model_.nodes()) {
    throw std::invalid_argument("hopping matrix does not match node count");
  }
  for (const auto& f : model_.forms) {
    if (f.dim() != modes_) throw GeometryError("forms disagree on the number of modes");
  }
  block_ = checked_power(cutoff, modes_);
  dim_ = block_ * static_cast<std::size_t>(model_.nodes());

  stride_.assign(modes_, 1);
  for (int i = modes_ - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * static_cast<std::size_t>(cutoff);
  sqrt_.resize(cutoff + 2);
  for (int n = 0; n < cutoff + 2; ++n) sqrt_[n] = std::sqrt(static_cast<double>(n));

  occupation_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(block_));
  for (int i = 0; i < modes_; ++i) {
    const std::size_t stride = stride_[i];
    for (std::size_t idx = 0; idx < block_; ++idx) {
      occupation_(static_cast<Eigen::Index>(idx)) += static_cast<double>((idx / stride) % cutoff);
    }
  }
}

void FockOperator::add_position(int mode, double coeff, const double* in, double* out) const {
  const double c = coeff * model_.x0 / std::sqrt(2.0);
  const std::size_t stride = stride_[mode];
  const std::size_t span = stride * cutoff_;
  for (std::size_t base = 0; base < block_; base += span) {
    for (int n = 0; n < cutoff_; ++n) {
      double* o = out + base + n * stride;
      if (n > 0) {
        const double a = c * sqrt_[n];
        const double* lo = in + base + (n - 1) * stride;
        for (std::size_t t = 0; t < stride; ++t) o[t] += a * lo[t];
      }
      if (n + 1 < cutoff_) {
        const double a = c * sqrt_[n + 1];
        const double* hi = in + base + (n + 1) * stride;
        for (std::size_t t = 0; t < stride; ++t) o[t] += a * hi[t];
      }
    }
  }
}

void FockOperator::add_position_squared(int mode, double coeff, const double* in, double* out) const {
  // (b + b^dag)^2 = b^2 + b^dag^2 + 2 n + 1, projected.
  const double c = coeff * model_.x0 * model_.x0 / 2.0;
  const std::size_t stride = stride_[mode];
  const std::size_t span = stride * cutoff_;
  for (std::size_t base = 0; base < block_; base += span) {
    for (int n = 0; n < cutoff_; ++n) {
      double* o = out + base + n * stride;
      const double* mid = in + base + n * stride;
      const double d = c * (2.0 * n + 1.0);
      for (std::size_t t = 0; t < stride; ++t) o[t] += d * mid[t];
      if (n >= 2) {
        const double a = c * sqrt_[n] * sqrt_[n - 1];
        const double* lo = in + base + (n - 2) * stride;
        for (std::size_t t = 0; t < stride; ++t) o[t] += a * lo[t];
      }
      if (n + 2 < cutoff_) {
        const double a = c * sqrt_[n + 1] * sqrt_[n + 2];
        const double* hi = in + base + (n + 2) * stride;
        for (std::size_t t = 0; t < stride; ++t) o[t] += a * hi[t];
      }
    }
  }
}

void FockOperator::add_momentum_squared(int mode, double coeff, const double* in, double* out) const {
  // p = i (b^dag - b) / (sqrt2 x0): p^2 = (2n + 1 - b^2 - b^dag^2) / (2 x0^2).
  const double c = coeff / (2.0 * model_.x0 * model_.x0);
  const std::size_t stride = stride_[mode];
  const std::size_t span = stride * cutoff_;
  for (std::size_t base = 0; base < block_; base += span) {
    for (int n = 0; n < cutoff_; ++n) {
      double* o = out + base + n * stride;
      const double* mid = in + base + n * stride;
      const double d = c * (2.0 * n + 1.0);
      for (std::size_t t = 0; t < stride; ++t) o[t] += d * mid[t];
      if (n >= 2) {
        const double a = -c * sqrt_[n] * sqrt_[n - 1];
        const double* lo = in + base + (n - 2) * stride;
        for (std::size_t t = 0; t < stride; ++t) o[t] += a * lo[t];
      }
      if (n + 2 < cutoff_) {
        const double a = -c * sqrt_[n + 1] * sqrt_[n + 2];
        const double* hi = in + base + (n + 2) * stride;
        for (std::size_t t = 0; t < stride; ++t) o[t] += a * hi[t];
      }
    }
  }
}

void FockOperator::apply(Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> y) const {
  const auto b = static_cast<Eigen::Index>(block_);
  const int nodes = model_.nodes();
  std::vector<Eigen::VectorXd> t;
  Eigen::VectorXd u;

  for (int s = 0; s < nodes; ++s) {
    const QuadraticVibronic& f = model_.forms[s];
    const auto xs = x.segment(s * b, b);
    auto ys = y.segment(s * b, b);
    ys = (model_.omega * occupation_.array() + f.constant).matrix().cwiseProduct(xs);

    for (int s2 = 0; s2 < nodes; ++s2) {
      const double hop = rabi_ * model_.hopping(s, s2);
      if (s2 != s && std::abs(hop) > kZero) ys += hop * x.segment(s2 * b, b);
    }

    bool cross = false;
    for (int i = 0; i < modes_; ++i) {
      if (std::abs(f.coupling(i, i)) > kZero) {
        add_position_squared(i, f.coupling(i, i), xs.data(), ys.data());
      }
      for (int j = 0; j < modes_; ++j)
        if (j != i && std::abs(f.coupling(i, j)) > kZero) cross = true;
    }

    if (!cross) {
      for (int i = 0; i < modes_; ++i)
        if (std::abs(f.linear(i)) > kZero) add_position(i, f.linear(i), xs.data(), ys.data());
      continue;
    }

    // sum_{i != j} C_ij X_i X_j x + l_i X_i x = sum_i X_i (l_i x + sum_{j != i} C_ij X_j x)
    t.resize(modes_);
    for (int j = 0; j < modes_; ++j) {
      t[j].setZero(b);
      add_position(j, 1.0, xs.data(), t[j].data());
    }
    u.resize(b);
    for (int i = 0; i < modes_; ++i) {
      u = f.linear(i) * xs;
      for (int j = 0; j < modes_; ++j)
        if (j != i && std::abs(f.coupling(i, j)) > kZero) u += f.coupling(i, j) * t[j];
      add_position(i, 1.0, u.data(), ys.data());
    }
  }
}

std::vector<Eigen::Triplet<double>> FockOperator::triplets() const {
  std::vector<Eigen::Triplet<double>> out;
  const double x0 = model_.x0;
  const double lin = x0 / std::sqrt(2.0);
  const double quad = x0 * x0 / 2.0;
  std::vector<int> shifted(modes_);

  for (std::size_t row = 0; row < dim_; ++row) {
    const auto [s, n] = describe(row);
    const QuadraticVibronic& f = model_.forms[s];
    const auto r = static_cast<int>(row);
    auto push = [&](int node, const std::vector<int>& target, double value) {
      if (std::abs(value) > kZero) out.emplace_back(r, static_cast<int>(index_of(node, target)), value);
    };

    double diag = f.constant;
    for (int i = 0; i < modes_; ++i) diag += model_.omega * n[i] + f.coupling(i, i) * quad * (2.0 * n[i] + 1.0);
    push(s, n, diag);

    for (int i = 0; i < modes_; ++i) {
      for (int step : {-1, 1}) {
        shifted = n;
        shifted[i] += step;
        if (shifted[i] < 0 || shifted[i] >= cutoff_) continue;
        push(s, shifted, f.linear(i) * lin * std::sqrt(static_cast<double>(std::max(n[i], shifted[i]))));
      }
      for (int step : {-2, 2}) {
        shifted = n;
        shifted[i] += step;
        if (shifted[i] < 0 || shifted[i] >= cutoff_) continue;
        const int hi = std::max(n[i], shifted[i]);
        push(s, shifted, f.coupling(i, i) * quad * std::sqrt(static_cast<double>(hi) * (hi - 1)));
      }
      for (int j = i + 1; j < modes_; ++j) {
        const double cij = f.coupling(i, j) + f.coupling(j, i);
        for (int si : {-1, 1}) {
          for (int sj : {-1, 1}) {
            shifted = n;
            shifted[i] += si;
            shifted[j] += sj;
            if (shifted[i] < 0 || shifted[i] >= cutoff_ || shifted[j] < 0 || shifted[j] >= cutoff_) continue;
            const double me = std::sqrt(static_cast<double>(std::max(n[i], shifted[i]))) *
                              std::sqrt(static_cast<double>(std::max(n[j], shifted[j])));
            push(s, shifted, cij * quad * me);
          }
        }
      }
    }
    for (int s2 = 0; s2 < model_.nodes(); ++s2) {
      if (s2 != s) push(s2, n, rabi_ * model_.hopping(s, s2));
    }
  }
  return out;
}

Eigen::SparseMatrix<double> FockOperator::sparse() const {
  const auto list = triplets();
  Eigen::SparseMatrix<double> h(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  h.setFromTriplets(list.begin(), list.end());
  return h;
}

std::size_t FockOperator::index_of(int node, std::span<const int> occupations) const {
  if (static_cast<int>(occupations.size()) != modes_) throw std::invalid_argument("occupation count mismatch");
  std::size_t idx = static_cast<std::size_t>(node) * block_;
  for (int i = 0; i < modes_; ++i) {
    if (occupations[i] < 0 || occupations[i] >= cutoff_) throw std::out_of_range("occupation outside cutoff");
    idx += static_cast<std::size_t>(occupations[i]) * stride_[i];
  }
  return idx;
}

std::pair<int, std::vector<int>> FockOperator::describe(std::size_t index) const {
  if (index >= dim_) throw std::out_of_range("basis index outside Fock space");
  const int node = static_cast<int>(index / block_);
  const std::size_t rest = index % block_;
  std::vector<int> occ(modes_);
  for (int i = 0; i < modes_; ++i) occ[i] = static_cast<int>((rest / stride_[i]) % cutoff_);
  return {node, occ};
}

std::size_t estimate_fock_bytes(int nodes, int modes, int cutoff, int krylov_dim) {
  const std::size_t dim = checked_power(cutoff, modes) * static_cast<std::size_t>(nodes);
  const std::size_t block = dim / static_cast<std::size_t>(nodes);
  const std::size_t vectors = static_cast<std::size_t>(krylov_dim) + 4;
  return sizeof(double) * (dim * vectors + block * (static_cast<std::size_t>(modes) + 2));
}

FockOperator build_fock_matrix(const VibronicModel& model, double rabi, int cutoff,
                               std::size_t budget_bytes) {
  if (cutoff < 2) throw std::invalid_argument("Fock cutoff must be at least 2");
  const std::size_t bytes = estimate_fock_bytes(model.nodes(), model.modes(), cutoff);
  if (bytes > budget_bytes) {
    throw ResourceError("Fock space with " + std::to_string(model.nodes()) + " nodes, " +
                            std::to_string(model.modes()) + " modes and cutoff " + std::to_string(cutoff) +
                            " needs about " + std::to_string(bytes >> 20) + " MiB (budget " +
                            std::to_string(budget_bytes >> 20) + " MiB)",
                        bytes);
  }
  return FockOperator(model, rabi, cutoff);
}

GroundState ground_state(const FockOperator& op, double tol) {
  LanczosOptions options;
  options.tol = tol;
  const EigenPair pair = lowest_eigenpair(
      [&op](Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> y) { op.apply(x, y); }, op.dim(),
      options);
  return GroundState{pair.value, pair.vector, pair.residual, pair.matvecs};
}

SolveReport converge_cutoff(const VibronicModel& model, double rabi, const ConvergenceOptions& options) {
  if (options.max_cutoff < 4) throw std::invalid_argument("max_cutoff must be at least 4");
  SolveReport report;
  int cutoff = std::min(std::max(options.start_cutoff, 2), options.max_cutoff);
  for (;;) {
    double energy = 0.0;
    try {
      const FockOperator op = build_fock_matrix(model, rabi, cutoff, options.budget_bytes);
      energy = ground_state(op, options.eig_tol).energy;
    } catch (const ResourceError& e) {
      report.note = e.what();
      report.status = "memory_budget";
      break;
    } catch (const ConvergenceError& e) {
      report.energy_history.emplace_back(cutoff, e.best_estimate());
      report.energy = e.best_estimate();
      report.cutoff = cutoff;
      report.note = e.what();
      report.status = "eigensolver";
      break;
    }
    report.energy_history.emplace_back(cutoff, energy);
    report.energy = energy;
    report.cutoff = cutoff;
    const auto n = report.energy_history.size();
    if (n >= 2 && std::abs(report.energy_history[n - 1].second - report.energy_history[n - 2].second) < options.e_tol) {
      report.converged = true;
      break;
    }
    if (cutoff >= options.max_cutoff) {
      report.note = "reached max_cutoff without meeting e_tol";
      report.status = "max_cutoff";
      break;
    }
    cutoff = std::min(2 * cutoff, options.max_cutoff);
  }
  return report;
}

QuadratureMoments quadrature_moments(const FockOperator& op, const Eigen::VectorXd& state, int mode) {
  if (mode < 0 || mode >= op.modes()) throw std::out_of_range("mode index out of range");
  if (static_cast<std::size_t>(state.size()) != op.dim()) throw std::invalid_argument("state dimension mismatch");
  const auto b = static_cast<Eigen::Index>(op.block_size());
  double x = 0.0, x2 = 0.0, p2 = 0.0;
  Eigen::VectorXd tmp(b);
  for (int s = 0; s < op.nodes(); ++s) {
    const Eigen::VectorXd psi = state.segment(s * b, b);
    tmp.setZero();
    op.add_position(mode, 1.0, psi.data(), tmp.data());
    x += psi.dot(tmp);
    tmp.setZero();
    op.add_position_squared(mode, 1.0, psi.data(), tmp.data());
    x2 += psi.dot(tmp);
    tmp.setZero();
    op.add_momentum_squared(mode, 1.0, psi.data(), tmp.data());
    p2 += psi.dot(tmp);
  }
  // Real states have <p> = 0.
  return QuadratureMoments{x, x2 - x * x, p2};
}

std::vector<Eigen::Vector3d> mean_atom_displacements(const FockOperator& op, const Eigen::VectorXd& state) {
  const ModeBasis& basis = op.model().basis;
  if (basis.dim() != op.modes()) throw std::invalid_argument("model carries no mode basis");
  Eigen::VectorXd disp = Eigen::VectorXd::Zero(basis.coordinates());
  for (int i = 0; i < op.modes(); ++i) disp += quadrature_moments(op, state, i).mean_x * basis.vectors.col(i);
  std::vector<Eigen::Vector3d> out(static_cast<std::size_t>(basis.coordinates() / 3));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = disp.segment<3>(3 * static_cast<Eigen::Index>(k));
  return out;
}

double hermiticity_residual(const Eigen::SparseMatrix<double>& h) {
  const Eigen::SparseMatrix<double> diff = h - Eigen::SparseMatrix<double>(h.transpose());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

void write_coordinate_dump(std::ostream& out, const FockOperator& op) {
  const Eigen::SparseMatrix<double> h = op.sparse();
  char line[96];
  for (int k = 0; k < h.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(h, k); it; ++it) {
      std::snprintf(line, sizeof line, "%lld %lld %.17g\n", static_cast<long long>(it.row()),
                    static_cast<long long>(it.col()), it.value());
      out << line;
    }
  }
}

}  // namespace vibronic
