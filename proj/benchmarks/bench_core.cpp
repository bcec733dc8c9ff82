#include <benchmark/benchmark.h>

#include "resmg/estimator.hpp"
#include "resmg/mesh.hpp"
#include "resmg/operators.hpp"
#include "resmg/rng.hpp"
#include "resmg/solver.hpp"

using namespace resmg;

namespace {

struct Fixture {
  MeshHierarchy mesh;
  Partition part;
  std::vector<LevelSystem> systems;
  GridVector u, f;

  Fixture(int m0, int levels) {
    mesh = build_hierarchy(m0, levels);
    part = build_partition(mesh, 2);
    systems = build_level_systems(mesh);
    const LevelSystem& fine = systems.back();
    u.resize(fine.size());
    f.resize(fine.size());
    Rng rng(7);
    for (double& x : u) x = rng.symmetric();
    for (double& x : f) x = rng.symmetric();
  }
};

void BM_ApplyOperator(benchmark::State& state) {
  Fixture fx(8, static_cast<int>(state.range(0)));
  GridVector out(fx.u.size());
  for (auto _ : state) {
    apply_operator(fx.systems.back(), fx.u, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * fx.u.size());
}

void BM_Residual(benchmark::State& state) {
  Fixture fx(8, static_cast<int>(state.range(0)));
  GridVector out(fx.u.size());
  for (auto _ : state) {
    residual(fx.systems.back(), fx.u, fx.f, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * fx.u.size());
}

void BM_SmoothSweep(benchmark::State& state) {
  Fixture fx(8, static_cast<int>(state.range(0)));
  CycleConfig cfg;
  GridVector scratch(fx.u.size());
  for (auto _ : state)
    smooth(fx.systems.back(), fx.u, fx.f, cfg, 1, Mask::full(), scratch);
  state.SetItemsProcessed(state.iterations() * fx.u.size());
}

void BM_Restrict(benchmark::State& state) {
  Fixture fx(8, static_cast<int>(state.range(0)));
  const auto& sys = fx.systems;
  TransferPair tp{sys[sys.size() - 2].grid, sys.back().grid};
  GridVector coarse(sys[sys.size() - 2].size());
  for (auto _ : state) {
    restrict_to_coarse(tp, fx.u, coarse);
    benchmark::DoNotOptimize(coarse.data());
  }
  state.SetItemsProcessed(state.iterations() * fx.u.size());
}

void BM_ProlongateAdd(benchmark::State& state) {
  Fixture fx(8, static_cast<int>(state.range(0)));
  const auto& sys = fx.systems;
  TransferPair tp{sys[sys.size() - 2].grid, sys.back().grid};
  GridVector coarse(sys[sys.size() - 2].size(), 0.25);
  for (auto _ : state) {
    prolongate_add(tp, coarse, fx.u);
    benchmark::DoNotOptimize(fx.u.data());
  }
  state.SetItemsProcessed(state.iterations() * fx.u.size());
}

void BM_VCycle(benchmark::State& state) {
  Fixture fx(8, static_cast<int>(state.range(0)));
  MultigridWorkspace ws(fx.systems);
  CycleConfig cfg;
  GridVector x(fx.u.size(), 0.0);
  for (auto _ : state) v_cycle(fx.systems, ws, x, fx.f, cfg, Mask::full());
  state.SetItemsProcessed(state.iterations() * fx.u.size());
}

void BM_HwEstimate(benchmark::State& state) {
  Fixture fx(8, static_cast<int>(state.range(0)));
  MultigridWorkspace ws(fx.systems);
  CycleConfig cfg;
  GridVector r(fx.u.size());
  residual(fx.systems.back(), fx.u, fx.f, r);
  for (auto _ : state) {
    HwReport rep = hw_estimate(fx.systems, r, fx.part, ws, cfg, false);
    benchmark::DoNotOptimize(rep.eta);
  }
  state.SetItemsProcessed(state.iterations() * fx.u.size());
}

}  // namespace

BENCHMARK(BM_ApplyOperator)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Residual)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmoothSweep)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Restrict)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProlongateAdd)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VCycle)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HwEstimate)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
