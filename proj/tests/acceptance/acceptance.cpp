// Acceptance suite: one PASS/FAIL line per criterion.
//   vibronic_acceptance          run all criteria
//   vibronic_acceptance 3 9      run a subset

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "tasks.hpp"
#include "vibronic/analytic.hpp"
#include "vibronic/bopes.hpp"
#include "vibronic/errors.hpp"
#include "vibronic/fock.hpp"

using namespace vibronic;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct System {
  Geometry geometry;
  PhysicalParams params;
  PotentialModel potential;
  ResonantGraph graph;
  double detuning;
};

System make(Preset preset, double kappa, double xi, double nu, double multiple = 1.0) {
  const PhysicalParams p = PhysicalParams::from_nu(1.0, 1.0, nu);
  const PotentialModel pot = ExplicitCouplings{kappa, xi, nu, 1.0};
  const Geometry g = Geometry::preset(preset, p.d()).with_motion(default_motion(preset));
  const double delta = -multiple;
  const ResonantGraph graph = build_resonant_manifold(g, delta, pot, p, lowest_configuration(g, delta, pot, p));
  return System{g, p, pot, graph, delta};
}

VibronicModel molecule(const System& s) {
  return build_molecular_model(s.graph, s.geometry, s.potential, s.params, s.detuning);
}

VibronicModel pair_block(const System& s, const std::string& bits) {
  return single_node_model(molecule(s), s.graph.index_of(ElectronicConfig::parse(bits)));
}

VibronicModel dumbbell_pair(double kappa, double xi) {
  const PhysicalParams p = PhysicalParams::from_nu(1.0, 1.0, 0.1);
  return single_node_model(dumbbell_hamiltonian(p, Couplings{kappa, xi, 0.1, 1.0}), 1);
}

double last_drop(const SolveReport& r) {
  const auto n = r.energy_history.size();
  return n < 2 ? 0.0 : r.energy_history[n - 2].second - r.energy_history[n - 1].second;
}

// 1 -------------------------------------------------------------------------------
Outcome graph_topology() {
  Outcome o{true, ""};
  auto check = [&](const char* name, bool ok) {
    o.pass = o.pass && ok;
    o.detail += std::string(name) + (ok ? " ok; " : " WRONG; ");
  };
  {
    const GraphClass c = graph_classify(make(Preset::Dumbbell, 0.1, 0.0, 0.1).graph);
    check("dumbbell/-V path3", c.topology == Topology::Path && c.degree_sequence.size() == 3);
  }
  {
    const GraphClass c = graph_classify(make(Preset::Triangle, 0.1, 0.0, 0.1).graph);
    check("triangle/-V ring6", c.topology == Topology::Ring && c.degree_sequence.size() == 6);
  }
  {
    const GraphClass c = graph_classify(make(Preset::Tetrahedron, 0.1, 0.0, 0.1).graph);
    check("tetrahedron/-V 10 nodes {3,3,3,3,2,2,2,2,2,2}",
          c.degree_sequence == std::vector<int>{3, 3, 3, 3, 2, 2, 2, 2, 2, 2} && c.connected);
  }
  {
    const GraphClass c = graph_classify(make(Preset::Tetrahedron, 0.1, 0.0, 0.1, 3.0).graph);
    check("tetrahedron/-3V star5", c.topology == Topology::Star && c.degree_sequence.size() == 5);
  }
  return o;
}

// 2 -------------------------------------------------------------------------------
Outcome mode_counts() {
  const int d = molecule(make(Preset::Dumbbell, -0.2, 0.05, 0.1)).modes();
  const int t = molecule(make(Preset::Triangle, -0.2, 0.05, 0.1)).modes();
  const int q = molecule(make(Preset::Tetrahedron, -0.2, 0.05, 0.1)).modes();
  return {d == 1 && t == 4 && q == 9,
          "dumbbell " + std::to_string(d) + ", triangle " + std::to_string(t) + ", tetrahedron " + std::to_string(q)};
}

// 3 -------------------------------------------------------------------------------
Outcome dumbbell_oracle() {
  Outcome o{true, ""};
  double worst = 0.0;
  int failures = 0;
  std::string failed;
  for (int i = 0; i < 5; ++i) {
    const double kappa = 0.25 * i;
    for (int j = 0; j < 5; ++j) {
      const double xb = -2.0 + 2.9 * j / 4.0;
      const double xi = xb * critical_points(1.0, 0.1).xi_c;
      ConvergenceOptions opt;  // e_tol 1e-8, cutoff <= 256
      const SolveReport r = converge_cutoff(dumbbell_pair(kappa, xi), 0.0, opt);
      const double err = std::abs(r.energy - epsilon2(kappa, xi, 1.0));
      worst = std::max(worst, err);
      if (!r.converged || !(err < 1e-6)) {
        ++failures;
        failed += "(k=" + num(kappa) + ",xb=" + num(xb) + ": err " + num(err) + (r.converged ? "" : ", not converged") + ") ";
      }
    }
  }
  o.pass = failures == 0;
  o.detail = "25 points, max |dE| " + num(worst) + (failures ? "; failing " + failed : "");
  return o;
}

// 4 -------------------------------------------------------------------------------
Outcome tetrahedron_oracle() {
  const double nu = 0.5;
  const CriticalPoints cp = critical_points(1.0, nu);
  double worst = 0.0;
  int failures = 0;
  for (double kb : {-0.6, -0.2, 0.3, 0.7}) {
    for (double xb : {-1.5, -0.5, 0.2, 0.5}) {
      const double kappa = kb * cp.kappa_c;
      const double xi = xb * cp.xi_c;
      ConvergenceOptions opt;
      opt.max_cutoff = 64;
      const SolveReport r = converge_cutoff(pair_block(make(Preset::Tetrahedron, kappa, xi, nu), "1100"), 0.0, opt);
      const double err = std::abs(r.energy - epsilon4(kappa, xi, 1.0, nu));
      worst = std::max(worst, err);
      if (!r.converged || !(err < 1e-6)) ++failures;
    }
  }
  return {failures == 0, "16 points (nu = 0.5, 3 coupled modes), max |dE| " + num(worst) + ", failing " +
                             std::to_string(failures)};
}

// 5 -------------------------------------------------------------------------------
Outcome instability_detection() {
  Outcome o{true, ""};
  const CriticalPoints cx = critical_points(1.0, 0.1);
  {
    ConvergenceOptions opt;
    const SolveReport beyond = converge_cutoff(dumbbell_pair(0.0, 1.2 * cx.xi_c), 0.0, opt);
    const SolveReport below = converge_cutoff(dumbbell_pair(0.0, 0.8 * cx.xi_c), 0.0, opt);
    const bool ok = !beyond.converged && last_drop(beyond) > 1e-3 && below.converged;
    o.pass = o.pass && ok;
    o.detail += "xi: 1.2xi_c drop " + num(last_drop(beyond)) + (beyond.converged ? " converged" : " unconverged") +
                ", 0.8xi_c " + (below.converged ? "converged" : "unconverged") + "; ";
  }
  {
    // Stiff parallel mode (xi = omega) keeps the displaced mode compact.
    const double nu = 0.1;
    ConvergenceOptions opt;
    opt.max_cutoff = 64;
    const SolveReport beyond =
        converge_cutoff(pair_block(make(Preset::Tetrahedron, 1.2 * cx.kappa_c, 1.0, nu), "1100"), 0.0, opt);
    const SolveReport below =
        converge_cutoff(pair_block(make(Preset::Tetrahedron, 0.8 * cx.kappa_c, 1.0, nu), "1100"), 0.0, opt);
    const bool ok = !beyond.converged && last_drop(beyond) > 1e-3 && below.converged;
    o.pass = o.pass && ok;
    o.detail += "kappa: 1.2kappa_c drop " + num(last_drop(beyond)) +
                (beyond.converged ? " converged" : " unconverged") + ", 0.8kappa_c " +
                (below.converged ? "converged" : "unconverged");
  }
  return o;
}

// 6 -------------------------------------------------------------------------------
Outcome finite_rabi_instability() {
  const PhysicalParams p = PhysicalParams::from_nu(1.0, 1.0, 0.1);
  const double xi_c = critical_points(1.0, 0.1).xi_c;
  ConvergenceOptions opt;
  const SolveReport past = converge_cutoff(dumbbell_hamiltonian(p, Couplings{0.1, 1.05 * xi_c, 0.1, 1.0}), 0.5, opt);
  const SolveReport inside = converge_cutoff(dumbbell_hamiltonian(p, Couplings{0.1, 0.95 * xi_c, 0.1, 1.0}), 0.5, opt);
  return {!past.converged && inside.converged,
          "Omega = 0.5: xi = 1.05xi_c " + std::string(past.converged ? "converged" : "unconverged") + " (last drop " +
              num(last_drop(past)) + "), xi = 0.95xi_c " + (inside.converged ? "converged" : "unconverged")};
}

// 7 -------------------------------------------------------------------------------
Outcome wigner_checks() {
  Outcome o{true, ""};
  double worst_norm = 0.0;
  double worst_product = 0.0;
  for (double w : {0.0, 0.3, -0.3, 0.9, -0.9}) {
    const WignerWidths wb = wigner_widths(w);
    worst_product = std::max(worst_product, std::abs(wb.plus * wb.minus - 4.0));
    // Trapezoid rule over +-12 standard deviations per axis.
    const int n = 801;
    const double er = 12.0 / std::sqrt(2.0 * wb.plus);
    const double ei = 12.0 / std::sqrt(2.0 * wb.minus);
    const double hr = 2 * er / (n - 1);
    const double hi = 2 * ei / (n - 1);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double cr = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      for (int j = 0; j < n; ++j) {
        const double ci = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        sum += cr * ci * wigner(w, {-er + hr * i, -ei + hi * j});
      }
    }
    worst_norm = std::max(worst_norm, std::abs(sum * hr * hi - 1.0));
  }
  const double nu = 0.1;
  const double kc = critical_points(1.0, nu).kappa_c;
  std::vector<double> minus;
  for (double r : {0.5, 0.9, 0.99}) {
    minus.push_back(wigner_widths(bogoliubov_w(1.0, perpendicular_xi(r * kc, nu)).w).minus);
  }
  const bool increasing = minus[0] < minus[1] && minus[1] < minus[2];
  o.pass = worst_norm < 1e-6 && worst_product < 1e-12 && increasing;
  o.detail = "max |norm - 1| " + num(worst_norm) + ", max |w+w- - 4| " + num(worst_product) + ", w- along kappa/kappa_c = " +
             num(minus[0], 5) + ", " + num(minus[1], 5) + ", " + num(minus[2], 5);
  return o;
}

// 8 -------------------------------------------------------------------------------
Outcome displacement_bound() {
  // nu = 0.1 is the regime the expansion assumes (x0/d <~ 0.1).
  const double nu = 0.1;
  const double kappa = 0.99 * critical_points(1.0, nu).kappa_c;
  const VibronicModel m = pair_block(make(Preset::Tetrahedron, kappa, 0.0, nu), "1100");
  double largest = 0.0;
  double previous = -1.0;
  double change = 0.0;
  for (int cutoff : {48, 64}) {
    const FockOperator op = build_fock_matrix(m, 0.0, cutoff);
    const GroundState gs = ground_state(op, 1e-8);
    largest = 0.0;
    for (const auto& v : mean_atom_displacements(op, gs.state)) largest = std::max(largest, v.norm());
    if (previous >= 0.0) change = std::abs(largest - previous);
    previous = largest;
  }
  const double closed_form = std::sqrt(2.0) * std::abs(kappa);
  return {largest < 0.4, "nu = 0.1, kappa = 0.99kappa_c: max per-atom |<dr>| = " + num(largest, 6) +
                             " x0 (closed form sqrt2|kappa|x0/omega = " + num(closed_form, 6) +
                             ", cutoff change " + num(change) + "); bound 0.4 x0"};
}

// 9 -------------------------------------------------------------------------------
Outcome bopes_quadratic() {
  const double kappa = -0.4, xi = -0.05, nu = 0.1;
  const System s = make(Preset::Triangle, kappa, xi, nu);
  const BoSurface surface = make_bo_surface(molecule(s), 0.0, s.graph, s.geometry);
  const MinimaReport rep = minimize_bo(surface);
  const QuadraticFit fit = bo_quadratic_check(surface, rep.minima.front().q);
  const double par = 0.5 + 2 * xi;
  const double perp = 0.5 + std::sqrt(2.0) * nu * kappa;
  const double lin = 2 * kappa;
  const double e_par = std::abs(fit.parallel_coeff / par - 1);
  const double e_perp = std::abs(fit.perpendicular_coeff / perp - 1);
  const double e_lin = std::abs(fit.linear_parallel_at_origin / lin - 1);
  const bool ok = e_par < 1e-4 && e_perp < 1e-4 && e_lin < 1e-4 && rep.degeneracy == 3 && rep.minima.size() == 3;
  return {ok, "minima " + std::to_string(rep.minima.size()) + " (degenerate " + std::to_string(rep.degeneracy) +
                  "), rel err par " + num(e_par) + ", perp " + num(e_perp) + ", linear " + num(e_lin)};
}

// 10 ------------------------------------------------------------------------------
Outcome quantum_correction_check() {
  Outcome o{true, ""};
  const double nu = 0.1;
  for (auto [kappa, xi] : {std::pair{-0.4, -0.05}, std::pair{0.3, 0.1}}) {
    const System s = make(Preset::Triangle, kappa, xi, nu);
    const VibronicModel m = molecule(s);
    ConvergenceOptions opt;
    opt.start_cutoff = 6;
    opt.max_cutoff = 24;
    const SolveReport r = converge_cutoff(m, 0.0, opt);
    BoSurface surface = make_bo_surface(m, 0.0, s.graph, s.geometry);
    const double ebo = minimize_bo(surface).global_energy;
    const double eq15 = quantum_correction(kappa, xi, 1.0, nu);
    const double err = std::abs((r.energy - ebo) - eq15);
    const bool ok = r.converged && err < 1e-6;
    o.pass = o.pass && ok;
    o.detail += "(kb=" + num(kappa_bar(kappa, 1.0, nu)) + ", xb=" + num(xi_bar(xi, 1.0)) + "): E-E_BO " +
                num(r.energy - ebo, 9) + " vs " + num(eq15, 9) + ", err " + num(err) + ", cutoff " +
                std::to_string(r.cutoff) + (r.converged ? "" : " unconverged") + "; ";
  }
  return o;
}

// 11 ------------------------------------------------------------------------------
Outcome transition_shape() {
  const double kappa = -0.4, xi = -0.05, nu = 0.1;
  const System s = make(Preset::Triangle, kappa, xi, nu);
  const BoSurface surface = make_bo_surface(molecule(s), 0.0, s.graph, s.geometry);
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.005 * i);
  TransitionOptions opt;
  opt.convergence.start_cutoff = 6;
  opt.convergence.max_cutoff = 12;
  const TransitionScan scan = transition_scan(surface, grid, opt);
  const double ratio = scan.bo_max_second_difference / scan.quantum_max_second_difference;
  const auto& p0 = scan.points.front();
  const double offset = *p0.e_quantum - p0.e_bo;
  const double eq15 = quantum_correction(kappa, xi, 1.0, nu);
  const bool below = offset < 0.0 && eq15 < 0.0;
  double spread = 0.0;
  for (const auto& p : scan.points) spread = std::max(spread, std::abs(*p.e_quantum - p.e_bo));
  return {ratio >= 5.0 && below,
          "BO max |d2E| " + num(scan.bo_max_second_difference) + " at Omega " + num(scan.kink_rabi, 5) + " +- " +
              num(scan.kink_uncertainty) + ", quantum max |d2E| " + num(scan.quantum_max_second_difference) +
              ", ratio " + num(ratio) + "; E_q - E_BO at Omega=0 " + num(offset, 6) + " (Eq15 " + num(eq15, 6) + ")"};
}

// 12 ------------------------------------------------------------------------------
Outcome determinism() {
  namespace fs = std::filesystem;
  const std::string text = R"({
    "geometry": {"preset": "triangle"},
    "potential": {"type": "explicit", "kappa": -0.4, "xi": -0.05, "nu": 0.1},
    "params": {"omega": 1.0, "x0": 1.0, "rabi": 0.05, "detuning": "-V"},
    "scan": {"start": 0.0, "stop": 0.8, "samples": 5},
    "solver": {"start_cutoff": 4, "max_cutoff": 8}
  })";
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  std::vector<std::string> csv, manifest;
  for (const char* dir : {"determinism_a", "determinism_b"}) {
    cli::RunConfig cfg = cli::parse_config(text, "determinism.json");
    cfg.task = "gs-scan-kappa";
    cfg.out_dir = dir;
    std::ostringstream log;
    if (cli::run(cfg, log) != cli::kOk) return {false, "run failed: " + log.str()};
    csv.push_back(slurp(fs::path(dir) / "gs_scan_kappa.csv"));
    manifest.push_back(slurp(fs::path(dir) / "run_manifest.json"));
  }
  const bool same = !csv[0].empty() && csv[0] == csv[1] && manifest[0] == manifest[1];
  return {same, "gs-scan-kappa CSV " + std::to_string(csv[0].size()) + " bytes, " +
                    (csv[0] == csv[1] ? "identical" : "DIFFERENT") + "; manifest " +
                    (manifest[0] == manifest[1] ? "identical" : "DIFFERENT")};
}

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "graph topology", 1.0, graph_topology},
      {2, "mode reduction dimensions", 1.0, mode_counts},
      {3, "dumbbell analytic-numeric oracle", 60.0, dumbbell_oracle},
      {4, "tetrahedron analytic-numeric oracle", 120.0, tetrahedron_oracle},
      {5, "instability detection", 120.0, instability_detection},
      {6, "finite-Omega instability persistence", 120.0, finite_rabi_instability},
      {7, "Wigner function", 10.0, wigner_checks},
      {8, "displacement bound", 60.0, displacement_bound},
      {9, "BOPES quadratic form", 60.0, bopes_quadratic},
      {10, "quantum correction", 300.0, quantum_correction_check},
      {11, "structural transition shape", 600.0, transition_shape},
      {12, "determinism", 60.0, determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::cout << "criterion " << c.id << " [" << c.title << "]: " << (pass ? "PASS" : "FAIL") << " | " << o.detail
              << " | " << num(secs) << " s (limit " << num(c.limit_s) << " s" << (in_time ? "" : ", EXCEEDED") << ")"
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
