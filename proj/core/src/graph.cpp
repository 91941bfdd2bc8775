#include "vibronic/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "vibronic/errors.hpp"

namespace vibronic {

ElectronicConfig::ElectronicConfig(int atoms, std::uint32_t mask) : atoms_(atoms), mask_(mask) {
  if (atoms < 1 || atoms > kMaxAtoms) throw std::invalid_argument("atom count must be in [1, 16]");
  if (atoms < 32 && (mask >> atoms) != 0u) throw std::invalid_argument("mask has bits beyond N");
}

ElectronicConfig ElectronicConfig::parse(const std::string& bits) {
  std::uint32_t mask = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] == '1') {
      mask |= 1u << k;
    } else if (bits[k] != '0') {
      throw std::invalid_argument("configuration must be a 0/1 string, got '" + bits + "'");
    }
  }
  return ElectronicConfig(static_cast<int>(bits.size()), mask);
}

int ElectronicConfig::excitations() const noexcept { return std::popcount(mask_); }

std::string ElectronicConfig::bits() const {
  std::string out(atoms_, '0');
  for (int k = 0; k < atoms_; ++k)
    if (excited(k)) out[k] = '1';
  return out;
}

bool ElectronicConfig::adjacent_to(const ElectronicConfig& other) const noexcept {
  return atoms_ == other.atoms_ && std::popcount(mask_ ^ other.mask_) == 1;
}

int ResonantGraph::index_of(const ElectronicConfig& config) const {
  const auto it = std::find(nodes.begin(), nodes.end(), config);
  return it == nodes.end() ? -1 : static_cast<int>(it - nodes.begin());
}

std::vector<int> ResonantGraph::degrees() const {
  std::vector<int> out(nodes.size());
  for (int i = 0; i < size(); ++i) out[i] = adjacency.row(i).sum();
  return out;
}

DetuningRule DetuningRule::parse(const std::string& text) {
  if (text == "-V") return facilitation(1.0);
  if (text.size() >= 3 && text.front() == '-' && text.back() == 'V') {
    const std::string factor = text.substr(1, text.size() - 2);
    std::size_t used = 0;
    const double m = std::stod(factor, &used);
    if (used != factor.size()) throw std::invalid_argument("bad detuning rule '" + text + "'");
    return facilitation(m);
  }
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad detuning rule '" + text + "'");
  return fixed(value);
}

double diagonal_energy(const ElectronicConfig& config, const Geometry& geometry, double detuning,
                       const PotentialModel& model, const PhysicalParams& params) {
  if (config.size() != geometry.size()) {
    throw GeometryError("configuration size does not match atom count");
  }
  double energy = detuning * config.excitations();
  for (int k = 0; k < geometry.size(); ++k) {
    if (!config.excited(k)) continue;
    for (int l = 0; l < k; ++l) {
      if (config.excited(l)) energy += pair_energy(model, params, geometry.distance(k, l));
    }
  }
  return energy;
}

ResonantGraph build_resonant_manifold(const Geometry& geometry, double detuning,
                                      const PotentialModel& model, const PhysicalParams& params,
                                      const ElectronicConfig& seed, double rel_tol) {
  const int n = geometry.size();
  if (n < 1 || n > ElectronicConfig::kMaxAtoms) {
    throw std::invalid_argument("manifold enumeration supports 1..16 atoms");
  }
  if (seed.size() != n) throw GeometryError("seed configuration size does not match atom count");

  const double e_seed = diagonal_energy(seed, geometry, detuning, model, params);
  const double window = rel_tol * std::max(std::abs(e_seed), params.omega());

  std::vector<ElectronicConfig> members;
  const std::uint32_t count = 1u << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    ElectronicConfig c(n, mask);
    if (std::abs(diagonal_energy(c, geometry, detuning, model, params) - e_seed) <= window) {
      members.push_back(c);
    }
  }
  std::sort(members.begin(), members.end(),
            [](const ElectronicConfig& a, const ElectronicConfig& b) { return a.bits() < b.bits(); });

  ResonantGraph graph;
  graph.nodes = std::move(members);
  graph.manifold_energy = e_seed;
  const int m = graph.size();
  graph.adjacency = Eigen::MatrixXi::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < i; ++j)
      if (graph.nodes[i].adjacent_to(graph.nodes[j])) graph.adjacency(i, j) = graph.adjacency(j, i) = 1;
  return graph;
}

ElectronicConfig lowest_configuration(const Geometry& geometry, double detuning, const PotentialModel& model,
                                      const PhysicalParams& params) {
  const int n = geometry.size();
  if (n < 1 || n > ElectronicConfig::kMaxAtoms) {
    throw std::invalid_argument("manifold enumeration supports 1..16 atoms");
  }
  ElectronicConfig best;
  double e_best = 0.0;
  const double tol = 1e-9 * params.omega();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    ElectronicConfig c(n, mask);
    const double e = diagonal_energy(c, geometry, detuning, model, params);
    if (best.size() == 0 || e < e_best - tol || (std::abs(e - e_best) <= tol && c.bits() < best.bits())) {
      best = c;
      e_best = e;
    }
  }
  return best;
}

GraphClass graph_classify(const ResonantGraph& graph) {
  GraphClass out;
  const int n = graph.size();
  if (n == 0) throw std::invalid_argument("cannot classify an empty graph");
  out.degree_sequence = graph.degrees();
  std::sort(out.degree_sequence.begin(), out.degree_sequence.end(), std::greater<>());

  std::vector<int> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (graph.adjacency(i, j) != 0 && !seen[j]) {
        seen[j] = 1;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  out.connected = reached == n;
  if (!out.connected || n < 2) return out;

  const auto& deg = out.degree_sequence;
  const int edges = std::accumulate(deg.begin(), deg.end(), 0) / 2;
  const auto ones = std::count(deg.begin(), deg.end(), 1);
  const auto twos = std::count(deg.begin(), deg.end(), 2);

  if (edges == n - 1 && ones == 2 && twos == n - 2) {
    out.topology = Topology::Path;
  } else if (n >= 3 && twos == n) {
    out.topology = Topology::Ring;
  } else if (n >= 4 && deg.front() == n - 1 && ones == n - 1) {
    out.topology = Topology::Star;
  }
  return out;
}

std::string to_string(Topology topology) {
  switch (topology) {
    case Topology::Path: return "path";
    case Topology::Ring: return "ring";
    case Topology::Star: return "star";
    case Topology::Other: return "other";
  }
  return "other";
}

double adjacency_lambda_max(const ResonantGraph& graph) {
  const Eigen::MatrixXd a = graph.adjacency.cast<double>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

void write_edge_list(std::ostream& out, const ResonantGraph& graph) {
  for (int i = 0; i < graph.size(); ++i)
    for (int j = i + 1; j < graph.size(); ++j)
      if (graph.adjacency(i, j) != 0) out << i << ' ' << j << '\n';
}

std::string node_table_json(const ResonantGraph& graph) {
  std::ostringstream os;
  char energy[64];
  std::snprintf(energy, sizeof energy, "%.17g", graph.manifold_energy);
  os << "{\n  \"manifold_energy\": " << energy << ",\n  \"nodes\": [";
  for (int i = 0; i < graph.size(); ++i) {
    os << (i == 0 ? "\n" : ",\n") << "    {\"index\": " << i << ", \"bits\": \""
       << graph.nodes[i].bits() << "\", \"excitations\": " << graph.nodes[i].excitations() << "}";
  }
  os << "\n  ]\n}\n";
  return os.str();
}

}  // namespace vibronic
