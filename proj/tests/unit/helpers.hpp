#pragma once

#include <string>

#include "vibronic/bopes.hpp"
#include "vibronic/vibronic.hpp"

namespace testing {

struct Built {
  vibronic::Geometry geometry;
  vibronic::PhysicalParams params;
  vibronic::PotentialModel potential;
  vibronic::ResonantGraph graph;
  vibronic::VibronicModel model;
};

// Preset with explicit couplings under facilitation Delta = -multiple V_d.
inline Built build(vibronic::Preset preset, double kappa, double xi, double nu, double multiple = 1.0,
                   vibronic::ModeSpace space = vibronic::ModeSpace::Reduced) {
  using namespace vibronic;
  const PhysicalParams params = PhysicalParams::from_nu(1.0, 1.0, nu);
  const PotentialModel pot = ExplicitCouplings{kappa, xi, nu, 1.0};
  const Geometry geo = Geometry::preset(preset, params.d()).with_motion(default_motion(preset));
  const double delta = -multiple * 1.0;
  const ResonantGraph graph =
      build_resonant_manifold(geo, delta, pot, params, lowest_configuration(geo, delta, pot, params));
  VibronicModel model = build_molecular_model(graph, geo, pot, params, delta, space);
  return Built{geo, params, pot, graph, model};
}

inline int node_index(const vibronic::ResonantGraph& g, const std::string& bits) {
  return g.index_of(vibronic::ElectronicConfig::parse(bits));
}

}  // namespace testing
