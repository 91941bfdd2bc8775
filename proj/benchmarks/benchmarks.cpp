#include <benchmark/benchmark.h>

#include "vibronic/bopes.hpp"
#include "vibronic/fock.hpp"
#include "vibronic/vibronic.hpp"

using namespace vibronic;

namespace {

struct Triangle {
  Geometry geometry;
  ResonantGraph graph;
  VibronicModel model;
};

Triangle triangle() {
  const PhysicalParams p = PhysicalParams::from_nu(1.0, 1.0, 0.1);
  const PotentialModel pot = ExplicitCouplings{-0.4, -0.05, 0.1, 1.0};
  const Geometry g = Geometry::preset(Preset::Triangle, p.d()).with_motion(default_motion(Preset::Triangle));
  const ResonantGraph graph = build_resonant_manifold(g, -1.0, pot, p, lowest_configuration(g, -1.0, pot, p));
  return {g, graph, build_molecular_model(graph, g, pot, p, -1.0)};
}

void BM_FockApply(benchmark::State& state) {
  const FockOperator op = build_fock_matrix(triangle().model, 0.1, static_cast<int>(state.range(0)));
  Eigen::VectorXd x = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(op.dim()));
  Eigen::VectorXd y(x.size());
  for (auto _ : state) {
    op.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(op.dim()));
}
BENCHMARK(BM_FockApply)->Arg(6)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_GroundState(benchmark::State& state) {
  const FockOperator op = build_fock_matrix(triangle().model, 0.1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ground_state(op).energy);
}
BENCHMARK(BM_GroundState)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_MinimizeBo(benchmark::State& state) {
  const Triangle t = triangle();
  const BoSurface surface = make_bo_surface(t.model, 0.1, t.graph, t.geometry);
  for (auto _ : state) benchmark::DoNotOptimize(minimize_bo(surface).global_energy);
}
BENCHMARK(BM_MinimizeBo)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
