#pragma once

// Physical parameters, radial interaction models and the derived vibronic
// coupling constants. Energies are in units of the trap frequency unless a
// caller says otherwise; hbar = 1.

#include <variant>
#include <vector>

namespace vibronic {

/// Drive, trap and geometry scales of the tweezer array.
///
/// `nu()` is always x0/d; there is no separate stored value that could drift.
class PhysicalParams {
 public:
  PhysicalParams() = default;

  /// Throws DomainError unless omega, x0 and d are all positive.
  PhysicalParams(double omega, double x0, double d, double rabi = 0.0, double detuning = 0.0);

  /// Oscillator length from the atomic mass, x0 = 1/sqrt(m*omega).
  static PhysicalParams from_mass(double omega, double mass, double d, double rabi = 0.0,
                                  double detuning = 0.0);

  /// Geometry scale from a dimensionless ratio, d = x0/nu.
  static PhysicalParams from_nu(double omega, double x0, double nu, double rabi = 0.0,
                                double detuning = 0.0);

  double omega() const noexcept { return omega_; }
  double x0() const noexcept { return x0_; }
  double d() const noexcept { return d_; }
  double nu() const noexcept { return x0_ / d_; }
  double rabi() const noexcept { return rabi_; }
  double detuning() const noexcept { return detuning_; }

  /// Trap stiffness in the convention energy = stiffness * x^2.
  double trap_stiffness() const noexcept { return omega_ / (2.0 * x0_ * x0_); }

  PhysicalParams with_rabi(double rabi) const;
  PhysicalParams with_detuning(double detuning) const;

 private:
  double omega_ = 1.0;
  double x0_ = 1.0;
  double d_ = 10.0;
  double rabi_ = 0.0;
  double detuning_ = 0.0;
};

struct PowerLawTerm {
  double C = 1.0;  ///< energy * length^p
  int p = 6;
};

/// V(r) = sum_i C_i / r^p_i. A single term is the usual van der Waals or
/// dipolar tail; two terms give Lennard-Jones-like shapes.
struct PowerLaw {
  std::vector<PowerLawTerm> terms;

  static PowerLaw single(double C, int p) { return PowerLaw{{PowerLawTerm{C, p}}}; }
};

/// Couplings pinned directly instead of being derived from a radial form.
/// `V_d` only enters the diagonal (configuration) energies used to find
/// resonant manifolds.
struct ExplicitCouplings {
  double kappa = 0.0;
  double xi = 0.0;
  double nu = 0.1;
  double V_d = 1.0;
};

using PotentialModel = std::variant<PowerLaw, ExplicitCouplings>;

struct PotentialValue {
  double V = 0.0;
  double V1 = 0.0;  ///< dV/dr
  double V2 = 0.0;  ///< d^2V/dr^2
};

struct Couplings {
  double kappa = 0.0;
  double xi = 0.0;
  double nu = 0.0;
  double V_d = 0.0;
};

/// Radial derivatives needed by the second-order expansion at one pair distance.
struct RadialDerivatives {
  double r0 = 0.0;
  double V = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
  double V1_over_r = 0.0;
};

/// Value and first two derivatives of a power-law model at r > 0.
/// Throws DomainError for r <= 0 and UnsupportedVariantError for ExplicitCouplings.
PotentialValue potential_eval(const PotentialModel& model, double r);

/// kappa = x0 V'(d)/sqrt2, xi = x0^2 V''(d)/2; explicit couplings pass through.
Couplings derive_couplings(const PotentialModel& model, const PhysicalParams& params);

/// Radial derivatives at pair distance r0. Explicit couplings only describe the
/// nearest-neighbour distance d = x0/nu; any other r0 is a GeometryError.
RadialDerivatives radial_derivatives(const PotentialModel& model, const PhysicalParams& params,
                                     double r0);

/// Interaction energy of a pair at distance r (V_d for explicit couplings at r = d).
double pair_energy(const PotentialModel& model, const PhysicalParams& params, double r);

}  // namespace vibronic
