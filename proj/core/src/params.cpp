#include "vibronic/params.hpp"

#include <cmath>
#include <string>

#include "vibronic/errors.hpp"

namespace vibronic {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool near_distance(double r, double d) { return std::abs(r - d) <= 1e-9 * std::max(r, d); }

}  // namespace

PhysicalParams::PhysicalParams(double omega, double x0, double d, double rabi, double detuning)
    : omega_(omega), x0_(x0), d_(d), rabi_(rabi), detuning_(detuning) {
  if (!(omega > 0.0)) throw DomainError("trap frequency omega must be positive");
  if (!(x0 > 0.0)) throw DomainError("oscillator length x0 must be positive");
  if (!(d > 0.0)) throw DomainError("equilibrium distance d must be positive");
}

PhysicalParams PhysicalParams::from_mass(double omega, double mass, double d, double rabi,
                                         double detuning) {
  if (!(mass > 0.0) || !(omega > 0.0)) throw DomainError("mass and omega must be positive");
  return PhysicalParams(omega, 1.0 / std::sqrt(mass * omega), d, rabi, detuning);
}

PhysicalParams PhysicalParams::from_nu(double omega, double x0, double nu, double rabi,
                                       double detuning) {
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  return PhysicalParams(omega, x0, x0 / nu, rabi, detuning);
}

PhysicalParams PhysicalParams::with_rabi(double rabi) const {
  PhysicalParams copy = *this;
  copy.rabi_ = rabi;
  return copy;
}

PhysicalParams PhysicalParams::with_detuning(double detuning) const {
  PhysicalParams copy = *this;
  copy.detuning_ = detuning;
  return copy;
}

PotentialValue potential_eval(const PotentialModel& model, double r) {
  const auto* law = std::get_if<PowerLaw>(&model);
  if (law == nullptr) {
    throw UnsupportedVariantError("explicit couplings have no radial form to evaluate");
  }
  if (!(r > 0.0)) throw DomainError("potential evaluated at non-positive distance");
  PotentialValue out;
  for (const auto& term : law->terms) {
    const double p = term.p;
    const double v = term.C / std::pow(r, p);
    out.V += v;
    out.V1 += -p * v / r;
    out.V2 += p * (p + 1.0) * v / (r * r);
  }
  return out;
}

Couplings derive_couplings(const PotentialModel& model, const PhysicalParams& params) {
  return std::visit(
      overloaded{
          [&](const PowerLaw&) {
            const PotentialValue v = potential_eval(model, params.d());
            const double x0 = params.x0();
            return Couplings{x0 * v.V1 / std::sqrt(2.0), x0 * x0 * v.V2 / 2.0, params.nu(), v.V};
          },
          [](const ExplicitCouplings& c) { return Couplings{c.kappa, c.xi, c.nu, c.V_d}; },
      },
      model);
}

RadialDerivatives radial_derivatives(const PotentialModel& model, const PhysicalParams& params,
                                     double r0) {
  if (!(r0 > 0.0)) throw GeometryError("coincident atoms: pair distance must be positive");
  return std::visit(
      overloaded{
          [&](const PowerLaw&) {
            const PotentialValue v = potential_eval(model, r0);
            return RadialDerivatives{r0, v.V, v.V1, v.V2, v.V1 / r0};
          },
          [&](const ExplicitCouplings& c) {
            const double x0 = params.x0();
            const double d = x0 / c.nu;
            if (!near_distance(r0, d)) {
              throw GeometryError("explicit couplings describe only pairs at d = x0/nu = " +
                                  std::to_string(d) + ", got r0 = " + std::to_string(r0));
            }
            const double v1 = std::sqrt(2.0) * c.kappa / x0;
            return RadialDerivatives{r0, c.V_d, v1, 2.0 * c.xi / (x0 * x0), v1 / d};
          },
      },
      model);
}

double pair_energy(const PotentialModel& model, const PhysicalParams& params, double r) {
  return radial_derivatives(model, params, r).V;
}

}  // namespace vibronic
