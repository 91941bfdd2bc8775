#include "tasks.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "vibronic/analytic.hpp"
#include "vibronic/errors.hpp"
#include "vibronic/parallel.hpp"

#ifndef VIBRONIC_VERSION
#define VIBRONIC_VERSION "0.0.0"
#endif

namespace vibronic::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct System {
  Geometry geometry;
  PhysicalParams params;
  PotentialModel potential;
  Couplings couplings;
  double detuning = 0.0;
  ElectronicConfig seed;
  ResonantGraph graph;
};

System make_system(const RunConfig& cfg, const PotentialModel& potential) {
  System s{cfg.geometry(), cfg.params(), potential, {}, 0.0, {}, {}};
  s.couplings = derive_couplings(potential, s.params);
  s.detuning = cfg.detuning.resolve(s.couplings.V_d);
  s.seed = cfg.seed ? ElectronicConfig::parse(*cfg.seed)
                    : lowest_configuration(s.geometry, s.detuning, potential, s.params);
  s.graph = build_resonant_manifold(s.geometry, s.detuning, potential, s.params, s.seed);
  return s;
}

struct Solvable {
  VibronicModel model;
  ResonantGraph graph;  ///< nodes actually kept
};

Solvable make_solvable(const RunConfig& cfg, const System& sys) {
  Solvable out;
  out.model = build_molecular_model(sys.graph, sys.geometry, sys.potential, sys.params, sys.detuning, cfg.modes);
  out.graph = sys.graph;
  if (cfg.block == "pair") {
    int pick = -1;
    for (int i = 0; i < sys.graph.size(); ++i) {
      if (sys.graph.nodes[i].excitations() == 2) {
        pick = i;
        break;
      }
    }
    if (pick < 0) throw std::invalid_argument("solver.block = \"pair\" needs a doubly excited node in the manifold");
    out.model = single_node_model(out.model, pick);
    out.graph.nodes = {sys.graph.nodes[pick]};
    out.graph.adjacency = Eigen::MatrixXi::Zero(1, 1);
  }
  return out;
}

ConvergenceOptions solver_for(const RunConfig& cfg, int modes) {
  ConvergenceOptions o = cfg.solver;
  if (!cfg.max_cutoff_set) o.max_cutoff = std::max(o.start_cutoff, default_max_cutoff(modes));
  return o;
}

bool paper_branch(const RunConfig& cfg, const System& sys) {
  return cfg.block == "pair" && cfg.preset != Preset::Custom && sys.geometry.motion() == default_motion(cfg.preset) &&
         cfg.modes == ModeSpace::Reduced;
}

/// Omega = 0 closed form for the solved model, "unstable" past criticality.
std::string analytic_cell(const RunConfig& cfg, const System& sys, const Solvable& sol, double rabi) {
  if (rabi != 0.0) return "";
  try {
    const Couplings& c = sys.couplings;
    const double w = sys.params.omega();
    if (paper_branch(cfg, sys)) {
      switch (cfg.preset) {
        case Preset::Dumbbell:
          return fmt(w * epsilon2(c.kappa, c.xi, w));
        case Preset::Triangle:
          return fmt(w * epsilon3(c.kappa, c.xi, w, c.nu));
        case Preset::Tetrahedron:
          return fmt(w * epsilon4(c.kappa, c.xi, w, c.nu));
        default:
          break;
      }
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& form : sol.model.forms) best = std::min(best, harmonic_ground_energy(form, w));
    return fmt(best);
  } catch (const InstabilityError&) {
    return "unstable";
  }
}

std::string bo_cell(const Solvable& sol, double rabi, int threads) {
  if (sol.model.modes() > 6) return "";
  BoSurface surface;
  surface.model = sol.model;
  surface.rabi = rabi;
  MinimizeOptions opts;
  opts.threads = threads;
  const MinimaReport rep = minimize_bo(surface, opts);
  if (rep.minima.empty()) return "unstable";
  return fmt(rep.global_energy);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

Json couplings_json(const RunConfig& cfg, const System& sys) {
  const Couplings& c = sys.couplings;
  const double w = sys.params.omega();
  Json j;
  j["kappa"] = c.kappa;
  j["xi"] = c.xi;
  j["nu"] = c.nu;
  j["V_d"] = c.V_d;
  const CriticalPoints cp = critical_points(w, c.nu);
  j["kappa_c"] = cp.kappa_c;
  j["xi_c"] = cp.xi_c;
  j["kappa_bar"] = kappa_bar(c.kappa, w, c.nu);
  j["xi_bar"] = xi_bar(c.xi, w);
  j["detuning"] = sys.detuning;
  j["seed"] = sys.seed.bits();
  (void)cfg;
  return j;
}

void warn_rabi(const RunConfig& cfg, const System& sys, double rabi, std::ostream& log) {
  if (sys.detuning != 0.0 && std::abs(rabi / sys.detuning) > 0.1) {
    log << "warning: |Omega/Delta| = " << std::abs(rabi / sys.detuning)
        << " > 0.1; off-resonant configurations are not included\n";
  }
  (void)cfg;
}

struct Manifest {
  Json j;
  explicit Manifest(const RunConfig& cfg) {
    j["tool"] = "vibronic";
    j["version"] = VIBRONIC_VERSION;
    j["task"] = cfg.task;
    j["config"] = cfg.resolved();
  }
  void write(const fs::path& dir) { write_file(dir / "run_manifest.json", j.dump(2) + "\n"); }
};

// graph ----------------------------------------------------------------------

int task_graph(const RunConfig& cfg, const fs::path& dir, Manifest& manifest, std::ostream&) {
  const System sys = make_system(cfg, cfg.potential);
  std::ostringstream edges;
  write_edge_list(edges, sys.graph);
  write_file(dir / "graph_edges.txt", edges.str());
  write_file(dir / "graph_nodes.json", node_table_json(sys.graph) + "\n");

  const GraphClass cls = graph_classify(sys.graph);
  Json summary;
  summary["nodes"] = sys.graph.size();
  summary["topology"] = to_string(cls.topology);
  summary["degree_sequence"] = cls.degree_sequence;
  summary["connected"] = cls.connected;
  summary["lambda_max"] = adjacency_lambda_max(sys.graph);
  try {
    const VibronicModel m =
        build_molecular_model(sys.graph, sys.geometry, sys.potential, sys.params, sys.detuning, cfg.modes);
    summary["modes"] = m.modes();
  } catch (const GeometryError& e) {
    summary["modes"] = nullptr;
    summary["modes_note"] = e.what();
  }
  manifest.j["derived"] = couplings_json(cfg, sys);
  manifest.j["summary"] = summary;
  manifest.j["outputs"] = Json::array({"graph_edges.txt", "graph_nodes.json"});
  return kOk;
}

// ground-state scans ----------------------------------------------------------

enum class ScanKind { Xi, Kappa, Omega };

int task_gs_scan(const RunConfig& cfg, ScanKind kind, const fs::path& dir, Manifest& manifest, std::ostream& log) {
  if (!cfg.scan) throw std::invalid_argument("this task needs a scan block");
  const auto* base = std::get_if<ExplicitCouplings>(&cfg.potential);
  if (kind != ScanKind::Omega && !base) {
    throw UnsupportedVariantError("xi and kappa scans need an explicit potential");
  }
  const System sys0 = make_system(cfg, cfg.potential);
  const double w = sys0.params.omega();
  const CriticalPoints cp = critical_points(w, sys0.couplings.nu);

  const std::vector<double> values = cfg.scan->values();
  struct Row {
    double xi, kappa, rabi;
    SolveReport report;
    std::string analytic, bo;
  };
  std::vector<Row> rows(values.size());

  if (kind != ScanKind::Omega) warn_rabi(cfg, sys0, cfg.rabi, log);
  for (double v : values) {
    if (kind == ScanKind::Omega) warn_rabi(cfg, sys0, cfg.scan->critical_units ? v * w : v, log);
  }

  parallel_for(values.size(), cfg.threads, [&](std::size_t i) {
    const double v = values[i];
    PotentialModel pot = cfg.potential;
    double rabi = cfg.rabi;
    if (kind == ScanKind::Xi) {
      ExplicitCouplings ec = *base;
      ec.xi = cfg.scan->critical_units ? v * cp.xi_c : v;
      pot = ec;
    } else if (kind == ScanKind::Kappa) {
      ExplicitCouplings ec = *base;
      ec.kappa = cfg.scan->critical_units ? v * cp.kappa_c : v;
      pot = ec;
    } else {
      rabi = cfg.scan->critical_units ? v * w : v;
    }
    const System sys = kind == ScanKind::Omega ? sys0 : make_system(cfg, pot);
    const Solvable sol = make_solvable(cfg, sys);
    Row& r = rows[i];
    r.xi = sys.couplings.xi;
    r.kappa = sys.couplings.kappa;
    r.rabi = rabi;
    r.report = converge_cutoff(sol.model, rabi, solver_for(cfg, sol.model.modes()));
    r.analytic = analytic_cell(cfg, sys, sol, rabi);
    r.bo = bo_cell(sol, rabi, 1);
  });

  std::ostringstream csv;
  csv << "xi,xi_bar,kappa,kappa_bar,Omega,E_numeric,E_analytic,E_BO,cutoff,converged,status\n";
  int converged = 0;
  for (const Row& r : rows) {
    csv << fmt(r.xi) << ',' << fmt(xi_bar(r.xi, w)) << ',' << fmt(r.kappa) << ','
        << fmt(kappa_bar(r.kappa, w, sys0.couplings.nu)) << ',' << fmt(r.rabi) << ','
        << (r.report.energy_history.empty() ? "" : fmt(r.report.energy)) << ',' << r.analytic << ',' << r.bo << ','
        << r.report.cutoff << ',' << (r.report.converged ? "true" : "false") << ',' << r.report.status << '\n';
    converged += r.report.converged ? 1 : 0;
  }
  const char* name = kind == ScanKind::Xi ? "gs_scan_xi.csv" : kind == ScanKind::Kappa ? "gs_scan_kappa.csv" : "gs_scan_omega.csv";
  write_file(dir / name, csv.str());

  const Solvable sol0 = make_solvable(cfg, sys0);
  manifest.j["derived"] = couplings_json(cfg, sys0);
  manifest.j["derived"]["modes"] = sol0.model.modes();
  manifest.j["derived"]["nodes"] = sol0.model.nodes();
  manifest.j["derived"]["max_cutoff"] = solver_for(cfg, sol0.model.modes()).max_cutoff;
  manifest.j["summary"] = Json{{"rows", rows.size()}, {"converged_rows", converged}};
  manifest.j["outputs"] = Json::array({name});
  return kOk;
}

// wigner -----------------------------------------------------------------------

int task_wigner(const RunConfig& cfg, const fs::path& dir, Manifest& manifest, std::ostream& log) {
  const PhysicalParams params = cfg.params();
  const Couplings c = derive_couplings(cfg.potential, params);
  const double w = params.omega();
  const bool parallel = cfg.wigner.mode == "parallel";
  const double xi_eff = parallel ? c.xi : perpendicular_xi(c.kappa, c.nu);
  const BogoliubovSolution bs = bogoliubov_w(w, xi_eff);

  Json derived;
  derived["kappa"] = c.kappa;
  derived["xi"] = c.xi;
  derived["nu"] = c.nu;
  derived["kappa_bar"] = kappa_bar(c.kappa, w, c.nu);
  derived["xi_bar"] = xi_bar(c.xi, w);
  derived["mode"] = cfg.wigner.mode;
  derived["xi_eff"] = xi_eff;
  manifest.j["derived"] = derived;
  if (!bs.exists) {
    log << "error: the " << cfg.wigner.mode << " mode has no normalisable ground state at these couplings\n";
    manifest.j["summary"] = Json{{"status", "unstable"}};
    manifest.j["outputs"] = Json::array();
    return kUnstable;
  }
  const WignerWidths widths = wigner_widths(bs.w);
  // Parallel mode sits at the displaced classical minimum.
  const double alpha0 = parallel ? -std::sqrt(2.0) * c.kappa / (w * (1.0 - xi_bar(c.xi, w))) : 0.0;

  const int n = cfg.wigner.samples;
  const double ext = cfg.wigner.extent;
  const double h = 2.0 * ext / (n - 1);
  std::ostringstream csv;
  csv << "alpha_R,alpha_I,W,converged\n";
  double integral = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ar = alpha0 - ext + h * i;
    const double wr = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    for (int j = 0; j < n; ++j) {
      const double ai = -ext + h * j;
      const double wi = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      const double value = wigner_displaced(bs.w, {ar, ai}, {alpha0, 0.0});
      integral += wr * wi * value * h * h;
      csv << fmt(ar) << ',' << fmt(ai) << ',' << fmt(value) << ",true\n";
    }
  }
  csv << "# normalization," << fmt(integral) << '\n';
  write_file(dir / "wigner.csv", csv.str());

  manifest.j["summary"] = Json{{"w", bs.w},
                               {"omega_tilde", bs.omega_tilde},
                               {"wbar_plus", widths.plus},
                               {"wbar_minus", widths.minus},
                               {"alpha0", alpha0},
                               {"normalization", integral}};
  manifest.j["outputs"] = Json::array({"wigner.csv"});
  return kOk;
}

// bopes-scan -------------------------------------------------------------------

int task_bopes(const RunConfig& cfg, const fs::path& dir, Manifest& manifest, std::ostream& log) {
  if (!cfg.scan) throw std::invalid_argument("bopes-scan needs a scan block over Omega");
  const System sys = make_system(cfg, cfg.potential);
  const Solvable sol = make_solvable(cfg, sys);
  const double w = sys.params.omega();
  std::vector<double> grid;
  for (double v : cfg.scan->values()) grid.push_back(cfg.scan->critical_units ? v * w : v);
  warn_rabi(cfg, sys, grid.back(), log);

  const BoSurface surface = make_bo_surface(sol.model, grid.front(), sol.graph, sys.geometry);
  TransitionOptions topt;
  topt.minimize = cfg.bopes.minimize;
  topt.minimize.threads = cfg.threads;
  topt.quantum = cfg.bopes.quantum;
  topt.convergence = solver_for(cfg, sol.model.modes());
  topt.refine_samples = cfg.bopes.refine_samples;
  const TransitionScan scan = transition_scan(surface, grid, topt);

  std::ostringstream tcsv;
  write_transition_csv(tcsv, scan);
  write_file(dir / "bopes_transition.csv", tcsv.str());

  MinimizeOptions mopt = cfg.bopes.minimize;
  mopt.threads = cfg.threads;
  const MinimaReport minima = minimize_bo(surface, mopt);
  std::ostringstream mcsv;
  for (int i = 0; i < surface.dim(); ++i) mcsv << 'q' << i << ',';
  mcsv << "E_BO,basin,node,converged\n";
  for (const auto& m : minima.minima) {
    for (Eigen::Index i = 0; i < m.q.size(); ++i) mcsv << fmt(m.q(i)) << ',';
    mcsv << fmt(m.energy) << ',' << m.basin << ',' << sol.graph.nodes[m.dominant_node].bits() << ','
         << (m.converged ? "true" : "false") << '\n';
  }
  write_file(dir / "bopes_minima.csv", mcsv.str());

  // Straight cut through the origin and the global minimum.
  std::vector<Eigen::VectorXd> cut;
  if (!minima.minima.empty() && surface.dim() > 0) {
    const Eigen::VectorXd q = minima.minima.front().q;
    const Eigen::VectorXd dirv = q.norm() > 0.0 ? Eigen::VectorXd(q) : Eigen::VectorXd::Unit(surface.dim(), 0) * sys.params.x0();
    const int n = cfg.bopes.surface_samples;
    for (int i = 0; i < n; ++i) cut.push_back((-1.5 + 3.0 * i / (n - 1)) * dirv);
  }
  std::ostringstream scsv;
  write_surface_csv(scsv, surface, cut);
  write_file(dir / "bopes_surface.csv", scsv.str());

  manifest.j["derived"] = couplings_json(cfg, sys);
  manifest.j["derived"]["modes"] = sol.model.modes();
  manifest.j["derived"]["nodes"] = sol.model.nodes();
  manifest.j["derived"]["max_cutoff"] = topt.convergence.max_cutoff;
  Json summary;
  summary["minima_at_first_omega"] = minima.minima.size();
  summary["degeneracy_at_first_omega"] = minima.degeneracy;
  summary["kink_omega"] = scan.kink_rabi;
  summary["kink_uncertainty"] = scan.kink_uncertainty;
  summary["bo_max_second_difference"] = scan.bo_max_second_difference;
  summary["quantum_max_second_difference"] = scan.quantum_max_second_difference;
  if (scan.quantum_max_second_difference > 0.0) {
    summary["second_difference_ratio"] = scan.bo_max_second_difference / scan.quantum_max_second_difference;
  }
  manifest.j["summary"] = summary;
  manifest.j["outputs"] = Json::array({"bopes_transition.csv", "bopes_minima.csv", "bopes_surface.csv"});
  return kOk;
}

// compare ----------------------------------------------------------------------

int task_compare(const RunConfig& cfg, const fs::path& dir, Manifest& manifest, std::ostream& log) {
  const System sys = make_system(cfg, cfg.potential);
  const Solvable sol = make_solvable(cfg, sys);
  warn_rabi(cfg, sys, cfg.rabi, log);
  const SolveReport report = converge_cutoff(sol.model, cfg.rabi, solver_for(cfg, sol.model.modes()));

  BoSurface surface;
  surface.model = sol.model;
  surface.rabi = cfg.rabi;
  MinimizeOptions mopt = cfg.bopes.minimize;
  mopt.threads = cfg.threads;
  const MinimaReport minima = minimize_bo(surface, mopt);
  const bool bo_ok = !minima.minima.empty();

  const std::string e_exact = analytic_cell(cfg, sys, sol, cfg.rabi);
  std::string e_bo_exact;
  if (cfg.rabi == 0.0) {
    try {
      e_bo_exact = fmt(bo_analytic_minimum(surface));
    } catch (const InstabilityError&) {
      e_bo_exact = "unstable";
    }
  }
  const bool have_numeric = !report.energy_history.empty();
  auto number = [](const std::string& s) { return s.empty() || s == "unstable" ? std::nan("") : std::stod(s); };

  std::ostringstream csv;
  csv << "quantity,numeric,analytic,abs_diff,converged\n";
  auto row = [&](const char* name, bool has, double numeric, const std::string& analytic, bool converged) {
    csv << name << ',' << (has ? fmt(numeric) : "") << ',' << analytic << ',';
    const double a = number(analytic);
    if (has && std::isfinite(a)) csv << fmt(std::abs(numeric - a));
    csv << ',' << (converged ? "true" : "false") << '\n';
  };
  row("E_ground", have_numeric, report.energy, e_exact, report.converged);
  row("E_BO_min", bo_ok, minima.global_energy, e_bo_exact, bo_ok);
  std::string corr_exact;
  if (!e_exact.empty() && !e_bo_exact.empty()) {
    const double a = number(e_exact);
    const double b = number(e_bo_exact);
    corr_exact = std::isfinite(a) && std::isfinite(b) ? fmt(a - b) : "unstable";
  }
  row("quantum_correction", have_numeric && bo_ok, report.energy - minima.global_energy, corr_exact,
      report.converged && bo_ok);
  write_file(dir / "compare.csv", csv.str());

  manifest.j["derived"] = couplings_json(cfg, sys);
  manifest.j["derived"]["modes"] = sol.model.modes();
  manifest.j["derived"]["nodes"] = sol.model.nodes();
  manifest.j["derived"]["max_cutoff"] = solver_for(cfg, sol.model.modes()).max_cutoff;
  Json hist = Json::array();
  for (const auto& [m, e] : report.energy_history) hist.push_back(Json::array({m, e}));
  manifest.j["summary"] = Json{{"converged", report.converged},
                               {"status", report.status},
                               {"cutoff", report.cutoff},
                               {"energy_history", hist},
                               {"bo_minima", minima.minima.size()},
                               {"bo_degeneracy", minima.degeneracy}};
  manifest.j["outputs"] = Json::array({"compare.csv"});
  return kOk;
}

}  // namespace

std::string usage() {
  std::string s =
      "usage: vibronic <task> --config <file.json> [--out DIR] [--threads N] [--modes reduced|full]\n"
      "tasks:\n";
  for (const auto& t : kTasks) s += "  " + t + "\n";
  return s;
}

int run(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir(cfg.out_dir);
  try {
    fs::create_directories(dir);
  } catch (const std::exception& e) {
    log << "error: cannot create output directory " << dir << ": " << e.what() << '\n';
    return kFailure;
  }
  Manifest manifest(cfg);
  int code = kOk;
  try {
    if (cfg.task == "graph") {
      code = task_graph(cfg, dir, manifest, log);
    } else if (cfg.task == "gs-scan-xi") {
      code = task_gs_scan(cfg, ScanKind::Xi, dir, manifest, log);
    } else if (cfg.task == "gs-scan-kappa") {
      code = task_gs_scan(cfg, ScanKind::Kappa, dir, manifest, log);
    } else if (cfg.task == "gs-scan-omega") {
      code = task_gs_scan(cfg, ScanKind::Omega, dir, manifest, log);
    } else if (cfg.task == "wigner") {
      code = task_wigner(cfg, dir, manifest, log);
    } else if (cfg.task == "bopes-scan") {
      code = task_bopes(cfg, dir, manifest, log);
    } else if (cfg.task == "compare") {
      code = task_compare(cfg, dir, manifest, log);
    } else {
      log << usage();
      return kUsage;
    }
  } catch (const ResourceError& e) {
    log << "error: " << e.what() << '\n';
    return kResource;
  } catch (const InstabilityError& e) {
    log << "error: " << e.what() << '\n';
    return kUnstable;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kFailure;
  }
  manifest.j["exit_code"] = code;
  manifest.write(dir);
  return code;
}

}  // namespace vibronic::cli
