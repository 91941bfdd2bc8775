#pragma once

// Classical electronic configurations, resonant (degenerate) manifolds under
// a chosen detuning, and the laser-coupling graph between them.

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vibronic/geometry.hpp"
#include "vibronic/params.hpp"

namespace vibronic {

/// N two-level atoms, bit k set when atom k is in the Rydberg state.
class ElectronicConfig {
 public:
  static constexpr int kMaxAtoms = 16;

  ElectronicConfig() = default;
  ElectronicConfig(int atoms, std::uint32_t mask);

  /// "0110": character k is atom k, '1' = Rydberg.
  static ElectronicConfig parse(const std::string& bits);

  int size() const noexcept { return atoms_; }
  std::uint32_t mask() const noexcept { return mask_; }
  bool excited(int k) const { return (mask_ >> k) & 1u; }
  int excitations() const noexcept;
  std::string bits() const;
  /// Same atom count, differ in exactly one atom.
  bool adjacent_to(const ElectronicConfig& other) const noexcept;

  friend bool operator==(const ElectronicConfig&, const ElectronicConfig&) = default;

 private:
  int atoms_ = 0;
  std::uint32_t mask_ = 0;
};

struct ResonantGraph {
  std::vector<ElectronicConfig> nodes;  ///< lexicographic in bitstring order
  Eigen::MatrixXi adjacency;            ///< symmetric 0/1, zero diagonal
  double manifold_energy = 0.0;

  int size() const noexcept { return static_cast<int>(nodes.size()); }
  int index_of(const ElectronicConfig& config) const;  ///< -1 if absent
  std::vector<int> degrees() const;
};

enum class Topology { Path, Ring, Star, Other };

struct GraphClass {
  Topology topology = Topology::Other;
  std::vector<int> degree_sequence;  ///< non-increasing
  bool connected = false;
};

/// Detuning rule for facilitation: Delta = -multiple * V(d), or explicit.
struct DetuningRule {
  bool explicit_value = false;
  double multiple = 1.0;
  double value = 0.0;

  static DetuningRule facilitation(double multiple) { return {false, multiple, 0.0}; }
  static DetuningRule fixed(double delta) { return {true, 1.0, delta}; }
  static DetuningRule parse(const std::string& text);  ///< "-V", "-3V", or a number
  double resolve(double V_d) const { return explicit_value ? value : -multiple * V_d; }
};

/// Delta * (#Rydberg) + sum_{k<l} V(r_kl) n_k n_l at equilibrium positions.
double diagonal_energy(const ElectronicConfig& config, const Geometry& geometry, double detuning,
                       const PotentialModel& model, const PhysicalParams& params);

/// All configurations degenerate with `seed` within rel_tol * max(|E_seed|, omega),
/// linked by single-atom flips. Requires 1 <= N <= 16.
ResonantGraph build_resonant_manifold(const Geometry& geometry, double detuning,
                                      const PotentialModel& model, const PhysicalParams& params,
                                      const ElectronicConfig& seed, double rel_tol = 1e-9);

/// Configuration with the lowest diagonal energy (bitstring order breaks ties);
/// the default seed of a manifold.
ElectronicConfig lowest_configuration(const Geometry& geometry, double detuning, const PotentialModel& model,
                                      const PhysicalParams& params);

GraphClass graph_classify(const ResonantGraph& graph);
std::string to_string(Topology topology);

/// Largest eigenvalue of the adjacency matrix.
double adjacency_lambda_max(const ResonantGraph& graph);

/// `i j` per line, 0-based, i < j, row-major order.
void write_edge_list(std::ostream& out, const ResonantGraph& graph);
/// {"manifold_energy": ..., "nodes": [{"index": i, "bits": "..."}...]}
std::string node_table_json(const ResonantGraph& graph);

}  // namespace vibronic
