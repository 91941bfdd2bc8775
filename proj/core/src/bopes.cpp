#include "vibronic/bopes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "vibronic/analytic.hpp"
#include "vibronic/nelder_mead.hpp"
#include "vibronic/parallel.hpp"

namespace vibronic {

namespace {

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_dim(const BoSurface& surface, const Eigen::VectorXd& q) {
  if (q.size() != surface.dim()) {
    throw std::invalid_argument("coordinate vector has " + std::to_string(q.size()) + " entries, surface has " +
                                std::to_string(surface.dim()) + " modes");
  }
}

Eigen::MatrixXd electronic_matrix(const BoSurface& surface, const Eigen::VectorXd& q) {
  check_dim(surface, q);
  const int n = surface.model.nodes();
  Eigen::MatrixXd m = surface.rabi * surface.model.hopping;
  for (int s = 0; s < n; ++s) m(s, s) += surface.model.forms[s].energy(q);
  return m;
}

}  // namespace

BoSurface BoSurface::at_rabi(double rabi_value) const {
  BoSurface copy = *this;
  copy.rabi = rabi_value;
  return copy;
}

BoSurface make_bo_surface(const VibronicModel& model, double rabi, const ResonantGraph& graph,
                          const Geometry& geometry) {
  if (graph.size() != model.nodes()) throw std::invalid_argument("graph and model disagree on the node count");
  BoSurface s;
  s.model = model;
  s.rabi = rabi;
  s.nodes = graph.nodes;
  s.geometry = geometry;
  return s;
}

double bo_energy(const BoSurface& surface, const Eigen::VectorXd& q) {
  const Eigen::MatrixXd m = electronic_matrix(surface, q);
  if (m.rows() == 1) return m(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

BoLevel bo_level(const BoSurface& surface, const Eigen::VectorXd& q) {
  const Eigen::MatrixXd m = electronic_matrix(surface, q);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  BoLevel level;
  level.energy = eig.eigenvalues()(0);
  level.gap = m.rows() > 1 ? eig.eigenvalues()(1) - eig.eigenvalues()(0) : std::numeric_limits<double>::infinity();
  level.electronic = eig.eigenvectors().col(0);
  level.electronic.cwiseAbs().maxCoeff(&level.dominant_node);
  return level;
}

Eigen::VectorXd bo_gradient(const BoSurface& surface, const Eigen::VectorXd& q) {
  const BoLevel level = bo_level(surface, q);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(q.size());
  for (int s = 0; s < surface.model.nodes(); ++s) {
    const double w = level.electronic(s) * level.electronic(s);
    if (w != 0.0) g += w * surface.model.forms[s].gradient(q);
  }
  return g;
}

std::vector<Eigen::VectorXd> bo_start_grid(int dim, double x0, double box) {
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(dim));
  for (int i = 0; i < dim; ++i) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
      v(i) = sign * 0.5 * box * x0;
      starts.push_back(v);
    }
  }
  if (dim == 0) return starts;

  const double radii[] = {box / 4.0, 2.0 * box / 3.0};
  auto add_sector = [&](std::uint64_t mask) {
    for (double r : radii) {
      Eigen::VectorXd v(dim);
      for (int i = 0; i < dim; ++i) v(i) = ((mask >> i) & 1u ? -r : r) * x0;
      starts.push_back(v);
    }
  };
  if (dim <= 10) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dim); ++mask) add_sector(mask);
  } else {
    std::mt19937_64 rng(0x5eed);
    for (int k = 0; k < 1024; ++k) add_sector(rng());
  }
  return starts;
}

MinimaReport minimize_bo(const BoSurface& surface, const MinimizeOptions& options) {
  const int dim = surface.dim();
  const double x0 = surface.model.x0;
  const double omega = surface.model.omega;

  std::vector<Eigen::VectorXd> starts = bo_start_grid(dim, x0, options.box);
  for (const auto& s : options.extra_starts) {
    check_dim(surface, s);
    starts.push_back(s);
  }

  NelderMeadOptions nm;
  nm.initial_step = 0.25 * x0;
  nm.f_tol = options.f_tol * omega;
  nm.x_tol = options.x_tol * x0;
  nm.max_evals = options.max_evals;

  auto f = [&](const Eigen::VectorXd& q) { return bo_energy(surface, q); };
  std::vector<NelderMeadResult> runs(starts.size());
  parallel_for(starts.size(), options.threads, [&](std::size_t i) { runs[i] = nelder_mead(f, starts[i], nm); });

  // Escaping starts (unbounded surface) are dropped; stable order for ties.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (std::isfinite(runs[i].f) && runs[i].x.lpNorm<Eigen::Infinity>() <= 100.0 * options.box * x0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return runs[a].f < runs[b].f; });

  MinimaReport report;
  report.starts = static_cast<int>(starts.size());
  for (std::size_t i : order) {
    const auto& r = runs[i];
    bool seen = false;
    for (const auto& m : report.minima) {
      if ((m.q - r.x).norm() <= options.tol_q * x0) {
        seen = true;
        break;
      }
    }
    if (seen) continue;
    BoMinimum m;
    m.q = r.x;
    m.energy = r.f;
    m.basin = static_cast<int>(report.minima.size());
    m.dominant_node = bo_level(surface, r.x).dominant_node;
    m.converged = r.converged;
    report.minima.push_back(std::move(m));
  }
  if (report.minima.empty()) {
    report.global_energy = -std::numeric_limits<double>::infinity();
    return report;
  }
  report.global_energy = report.minima.front().energy;
  for (const auto& m : report.minima) {
    if (m.energy - report.global_energy <= options.degeneracy_tol * omega) ++report.degeneracy;
  }
  return report;
}

QuadraticFit bo_quadratic_check(const BoSurface& surface, const Eigen::VectorXd& center, double radius) {
  check_dim(surface, center);
  if (!surface.geometry || surface.nodes.size() != static_cast<std::size_t>(surface.model.nodes())) {
    throw std::invalid_argument("quadratic check needs the geometry and node labels");
  }
  if (surface.model.basis.dim() != surface.dim()) throw std::invalid_argument("quadratic check needs the mode basis");

  const int dim = surface.dim();
  const double x0 = surface.model.x0;
  const double omega = surface.model.omega;
  const BoLevel mid = bo_level(surface, center);

  QuadraticFit fit;
  fit.node = mid.dominant_node;

  std::vector<Eigen::VectorXd> offsets;
  offsets.push_back(Eigen::VectorXd::Zero(dim));
  for (int i = 0; i < dim; ++i) {
    for (double si : {1.0, -1.0}) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
      v(i) = si;
      offsets.push_back(v);
    }
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      for (double si : {1.0, -1.0}) {
        for (double sj : {1.0, -1.0}) {
          Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
          v(i) = si;
          v(j) = sj;
          offsets.push_back(v);
        }
      }
    }
  }

  double h = radius * x0;
  std::vector<double> values(offsets.size());
  for (;;) {
    bool crossing = false;
    for (std::size_t k = 0; k < offsets.size() && !crossing; ++k) {
      const BoLevel level = bo_level(surface, center + h * offsets[k]);
      values[k] = level.energy;
      crossing = level.dominant_node != mid.dominant_node || level.gap <= 1e-9 * omega;
    }
    if (!crossing) break;
    if (++fit.refinements > 40) throw std::runtime_error("quadratic check: centre sits on a level crossing");
    h *= 0.5;
  }
  fit.radius = h / x0;

  // Unknowns in scaled coordinates u = dq/h: a, b_i, c_ii, c_ij (i<j).
  const int unknowns = 1 + dim + dim * (dim + 1) / 2;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(offsets.size()), unknowns);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(offsets.size()));
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const auto& u = offsets[k];
    int c = 0;
    design(k, c++) = 1.0;
    for (int i = 0; i < dim; ++i) design(k, c++) = u(i);
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j) design(k, c++) = (i == j ? 1.0 : 2.0) * u(i) * u(j);
    }
    rhs(k) = values[k] - values[0];
  }
  const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(rhs);
  fit.fit_rms = std::sqrt((design * sol - rhs).squaredNorm() / static_cast<double>(rhs.size()));

  fit.value = values[0] + sol(0);
  fit.gradient = sol.segment(1, dim) / h;
  fit.quadratic = Eigen::MatrixXd::Zero(dim, dim);
  int c = 1 + dim;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      fit.quadratic(i, j) = fit.quadratic(j, i) = sol(c++) / (h * h);
    }
  }

  const ElectronicConfig& config = surface.nodes[static_cast<std::size_t>(fit.node)];
  if (config.excitations() != 2) throw std::invalid_argument("quadratic check needs a doubly excited node at the centre");
  int k = -1;
  int l = -1;
  for (int a = 0; a < config.size(); ++a) {
    if (config.excited(a)) (k < 0 ? k : l) = a;
  }
  const Geometry& geo = *surface.geometry;
  const Eigen::Vector3d dir = (geo.position(l) - geo.position(k)).normalized();
  const Eigen::VectorXd reduced = surface.model.basis.vectors.transpose() * pair_mode_vector(geo.size(), l, k, dir);
  fit.parallel_norm = reduced.norm();
  fit.parallel = reduced / fit.parallel_norm;
  fit.parallel_coeff = fit.parallel.dot(fit.quadratic * fit.parallel);
  fit.linear_parallel_at_origin = fit.parallel.dot(fit.gradient - 2.0 * fit.quadratic * center);

  if (dim > 1) {
    // Orthonormal complement of the parallel direction.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(fit.parallel);
    const Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
    const Eigen::MatrixXd comp = full.rightCols(dim - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(comp.transpose() * fit.quadratic * comp);
    const double trap = surface.model.forms[static_cast<std::size_t>(fit.node)].trap;
    Eigen::Index pick = 0;
    (eig.eigenvalues().array() - trap).abs().maxCoeff(&pick);
    fit.perpendicular_coeff = eig.eigenvalues()(pick);
    fit.perpendicular = comp * eig.eigenvectors().col(pick);
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
      if (i != pick) fit.other_coeffs.push_back(eig.eigenvalues()(i));
    }
  }
  return fit;
}

double bo_analytic_minimum(const BoSurface& surface) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& form : surface.model.forms) best = std::min(best, classical_minimum(form).energy);
  return best;
}

namespace {

struct BoSample {
  double energy = 0.0;
  Eigen::VectorXd q;
  int degeneracy = 0;
  std::vector<Eigen::VectorXd> minima;
};

BoSample bo_sample(const BoSurface& surface, double rabi, const MinimizeOptions& base,
                   const std::vector<Eigen::VectorXd>& warm) {
  MinimizeOptions opts = base;
  opts.extra_starts.insert(opts.extra_starts.end(), warm.begin(), warm.end());
  const MinimaReport rep = minimize_bo(surface.at_rabi(rabi), opts);
  BoSample s;
  s.energy = rep.global_energy;
  s.degeneracy = rep.degeneracy;
  if (!rep.minima.empty()) s.q = rep.minima.front().q;
  for (const auto& m : rep.minima) s.minima.push_back(m.q);
  return s;
}

std::pair<std::size_t, double> max_second_difference(const std::vector<double>& e) {
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t i = 1; i + 1 < e.size(); ++i) {
    const double d2 = std::abs(e[i + 1] - 2.0 * e[i] + e[i - 1]);
    if (d2 > best) {
      best = d2;
      arg = i;
    }
  }
  return {arg, std::max(best, 0.0)};
}

}  // namespace

TransitionScan transition_scan(const BoSurface& surface, const std::vector<double>& rabi_grid,
                               const TransitionOptions& options) {
  const std::size_t n = rabi_grid.size();
  if (n < 32) throw std::invalid_argument("transition scan needs at least 32 Omega samples");
  const double step = (rabi_grid.back() - rabi_grid.front()) / static_cast<double>(n - 1);
  if (!(step > 0.0)) throw std::invalid_argument("Omega grid must be increasing");
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(rabi_grid[i] - rabi_grid[i - 1] - step) > 1e-9 * std::max(1.0, std::abs(step))) {
      throw std::invalid_argument("Omega grid must be uniform");
    }
  }

  TransitionScan scan;
  scan.points.resize(n);
  std::vector<Eigen::VectorXd> warm;
  for (std::size_t i = 0; i < n; ++i) {
    const BoSample s = bo_sample(surface, rabi_grid[i], options.minimize, warm);
    auto& p = scan.points[i];
    p.rabi = rabi_grid[i];
    p.e_bo = s.energy;
    p.q_bo = s.q;
    p.bo_degeneracy = s.degeneracy;
    if (rabi_grid[i] == 0.0) p.e_analytic = bo_analytic_minimum(surface);
    warm = s.minima;
  }

  if (options.quantum) {
    std::vector<SolveReport> reports(n);
    parallel_for(n, options.minimize.threads,
                 [&](std::size_t i) { reports[i] = converge_cutoff(surface.model, rabi_grid[i], options.convergence); });
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isfinite(reports[i].energy) && !reports[i].energy_history.empty()) {
        scan.points[i].e_quantum = reports[i].energy;
      }
      scan.points[i].quantum_converged = reports[i].converged;
      scan.points[i].quantum_cutoff = reports[i].cutoff;
    }
    bool all = true;
    std::vector<double> eq;
    for (const auto& p : scan.points) {
      all = all && p.e_quantum.has_value();
      if (p.e_quantum) eq.push_back(*p.e_quantum);
    }
    if (all) scan.quantum_max_second_difference = max_second_difference(eq).second;
  }

  std::vector<double> ebo;
  for (const auto& p : scan.points) ebo.push_back(p.e_bo);
  const auto [arg, d2] = max_second_difference(ebo);
  scan.kink_index = arg;
  scan.bo_max_second_difference = d2;
  scan.kink_rabi = rabi_grid[arg];
  scan.kink_uncertainty = step;

  // One refinement pass spanning the neighbours of the coarse peak.
  const int m = std::max(4, options.refine_samples);
  const double lo = rabi_grid[arg - 1];
  const double fine = 2.0 * step / m;
  std::vector<double> efine;
  std::vector<double> wfine;
  warm.clear();
  for (const auto& q : {scan.points[arg - 1].q_bo, scan.points[arg].q_bo, scan.points[arg + 1].q_bo}) warm.push_back(q);
  for (int j = 0; j <= m; ++j) {
    const double r = lo + fine * j;
    const BoSample s = bo_sample(surface, r, options.minimize, warm);
    efine.push_back(s.energy);
    wfine.push_back(r);
    for (const auto& q : s.minima) warm.push_back(q);
    if (warm.size() > 24) warm.erase(warm.begin(), warm.end() - 24);
  }
  const auto [farg, fd2] = max_second_difference(efine);
  (void)fd2;
  scan.kink_rabi = wfine[farg];
  scan.kink_uncertainty = fine;
  return scan;
}

void write_surface_csv(std::ostream& out, const BoSurface& surface, const std::vector<Eigen::VectorXd>& points) {
  for (int i = 0; i < surface.dim(); ++i) out << 'q' << i << ',';
  out << "E_BO\n";
  for (const auto& q : points) {
    for (Eigen::Index i = 0; i < q.size(); ++i) out << fmt(q(i)) << ',';
    out << fmt(bo_energy(surface, q)) << '\n';
  }
}

void write_transition_csv(std::ostream& out, const TransitionScan& scan) {
  out << "Omega,E_BO,E_quantum,E_analytic,quantum_converged,quantum_cutoff\n";
  for (const auto& p : scan.points) {
    out << fmt(p.rabi) << ',' << fmt(p.e_bo) << ',' << (p.e_quantum ? fmt(*p.e_quantum) : "") << ','
        << (p.e_analytic ? fmt(*p.e_analytic) : "") << ',' << (p.quantum_converged ? "true" : "false") << ','
        << p.quantum_cutoff << '\n';
  }
}

}  // namespace vibronic
