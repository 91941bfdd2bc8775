#pragma once

// Second-order expansion of the pair interaction around the equilibrium
// geometry, per-configuration quadratic vibrational Hamiltonians, and the
// reduction of 3N displacements to the collective modes that actually couple.
//
// Quadratic forms use the convention
//     E(x) = constant + linear . x + x^T (coupling + trap * 1) x
// over displacement coordinates x (length units). The trap stiffness is
// omega/(2 x0^2), so the quantised trap is omega b^dag b with the zero-point
// energy dropped; interaction terms are kept literally, e.g. the relative
// mode of an excited pair carries xi (b + b^dag)^2 including its constant.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vibronic/geometry.hpp"
#include "vibronic/graph.hpp"
#include "vibronic/params.hpp"

namespace vibronic {

/// Gradient and the two Hessian pieces of V at one equilibrium pair vector.
struct ExpansionCoefficients {
  Eigen::RowVector3d G = Eigen::RowVector3d::Zero();
  Eigen::Matrix3d Ha = Eigen::Matrix3d::Zero();  ///< V'' rhat rhat^T
  Eigen::Matrix3d Hb = Eigen::Matrix3d::Zero();  ///< V'/r (1 - rhat rhat^T)
};

struct QuadraticVibronic {
  std::string label;  ///< bitstring of the electronic state, or a symbolic name
  double constant = 0.0;
  Eigen::VectorXd linear;
  Eigen::MatrixXd coupling;  ///< interaction part only, symmetric
  double trap = 0.5;         ///< omega/(2 x0^2)

  int dim() const noexcept { return static_cast<int>(linear.size()); }
  /// coupling + trap * 1
  Eigen::MatrixXd quadratic() const;
  /// Classical energy at displacement q.
  double energy(const Eigen::VectorXd& q) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& q) const;
  bool trap_only(double tol = 1e-14) const;
};

/// Orthonormal collective displacement directions, one column per mode (3N x dim).
struct ModeBasis {
  Eigen::MatrixXd vectors;

  int dim() const noexcept { return static_cast<int>(vectors.cols()); }
  int coordinates() const noexcept { return static_cast<int>(vectors.rows()); }
};

/// Everything the Fock solver and the BO surfaces need: weighted electronic
/// hopping (multiplied by Omega), one quadratic form per electronic node over
/// a shared mode space, and the scales that map coordinates to ladder operators.
struct VibronicModel {
  Eigen::MatrixXd hopping;  ///< symmetric, zero diagonal
  std::vector<QuadraticVibronic> forms;
  ModeBasis basis;  ///< may be empty for models built directly in mode space
  double omega = 1.0;
  double x0 = 1.0;

  int nodes() const noexcept { return static_cast<int>(forms.size()); }
  int modes() const noexcept { return forms.empty() ? 0 : forms.front().dim(); }
};

ExpansionCoefficients expansion_coeffs(int k, int l, const Geometry& geometry,
                                       const PotentialModel& model, const PhysicalParams& params);

/// Quadratic form of one electronic configuration over all 3N displacements.
/// `reference_energy` is subtracted from the configuration energy (normally the
/// manifold energy, so degenerate nodes start at zero). Linear and coupling
/// terms are projected on the geometry's allowed motion.
QuadraticVibronic assemble_state_hamiltonian(const ElectronicConfig& state, const Geometry& geometry,
                                             const PotentialModel& model,
                                             const PhysicalParams& params, double detuning,
                                             double reference_energy);

std::vector<QuadraticVibronic> assemble_manifold(const ResonantGraph& graph, const Geometry& geometry,
                                                 const PotentialModel& model,
                                                 const PhysicalParams& params, double detuning);

struct ModeReduction {
  ModeBasis basis;
  std::vector<QuadraticVibronic> forms;  ///< rewritten over basis coordinates
};

/// Collective modes spanned by every linear vector and every non-zero
/// eigenvector of the couplings, Gram-Schmidt orthonormalised in a fixed order
/// (linear vectors by node, then eigenvectors by node and descending |eigenvalue|).
/// Throws GeometryError if the forms disagree on the coordinate count.
ModeReduction reduce_modes(const std::vector<QuadraticVibronic>& forms);

/// Rewrite forms in an arbitrary orthonormal basis (3N x D).
std::vector<QuadraticVibronic> project_forms(const std::vector<QuadraticVibronic>& forms,
                                             const ModeBasis& basis);

/// Largest norm of any linear vector or coupling column left outside `basis`.
double residual_outside_span(const std::vector<QuadraticVibronic>& forms, const ModeBasis& basis);

enum class ModeSpace { Reduced, Full };

/// Graph + forms assembled into a solver-ready model.
VibronicModel build_molecular_model(const ResonantGraph& graph, const Geometry& geometry,
                                    const PotentialModel& model, const PhysicalParams& params,
                                    double detuning, ModeSpace space = ModeSpace::Reduced);

/// One node of a model on its own modes (the other directions are free oscillators).
VibronicModel single_node_model(const VibronicModel& model, int node);

/// Two-state dumbbell model over {|+>, |uu>} with hopping sqrt2 and one relative mode.
VibronicModel dumbbell_hamiltonian(const PhysicalParams& params, const Couplings& couplings);

/// Unit vector of the relative pair mode (e_k - e_l) (x) direction / sqrt2 in 3N space.
Eigen::VectorXd pair_mode_vector(int atoms, int k, int l, const Eigen::Vector3d& direction);

}  // namespace vibronic
