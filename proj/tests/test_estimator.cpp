#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "resmg/estimator.hpp"
#include "resmg/experiment.hpp"
#include "resmg/fault.hpp"
#include "resmg/rng.hpp"

using namespace resmg;

namespace {

GridVector random_vector(std::int64_t n, std::uint64_t seed) {
  Rng rng(seed);
  GridVector v(n);
  for (double& x : v) x = rng.symmetric();
  return v;
}

}  // namespace

TEST_CASE("zero residual estimates zero error") {
  const MeshHierarchy mesh = build_hierarchy(4, 2);
  const Partition part = build_partition(mesh, 2);
  const auto systems = build_level_systems(mesh);
  MultigridWorkspace ws(systems);
  const GridVector r(systems.back().size(), 0.0);
  const HwReport rep = hw_estimate(systems, r, part, ws, CycleConfig{}, true);
  CHECK(rep.eta == 0.0);
  for (double e : rep.rank_eta) CHECK(e == 0.0);
  for (double s : rep.field) CHECK(s == 0.0);
}

TEST_CASE("per-rank contributions decompose the global estimate exactly") {
  const MeshHierarchy mesh = build_hierarchy(4, 2);
  const Partition part = build_partition(mesh, 2);
  const auto systems = build_level_systems(mesh);
  MultigridWorkspace ws(systems);
  const std::int64_t n = systems.back().size();

  for (int trial = 0; trial < 5; ++trial) {
    const GridVector r = random_vector(n, 300 + trial);
    const HwReport rep = hw_estimate(systems, r, part, ws, CycleConfig{});
    REQUIRE(rep.rank_eta.size() == static_cast<std::size_t>(part.ranks()));
    double sum = 0;
    std::int64_t covered = 0;
    for (int p = 0; p < part.ranks(); ++p) {
      sum += static_cast<double>(rep.rank_nodes[p]) * rep.rank_eta[p] *
             rep.rank_eta[p];
      covered += rep.rank_nodes[p];
    }
    CHECK(covered == n);
    const double global = static_cast<double>(n) * rep.eta * rep.eta;
    CHECK(std::abs(global - sum) <= 1e-12 * global);
  }
}

TEST_CASE("rank sums follow the lower-box convention on face nodes") {
  const MeshHierarchy mesh = build_hierarchy(2, 1);
  const Partition part = build_partition(mesh, 2);
  const LevelGrid& g = mesh.finest_grid();
  GridVector v(g.interior_count(), 0.0);

  v[g.index(1, 1, 1)] = 1.0;
  auto sums = rank_squared_sums(v, part, g);
  CHECK(sums[0] == 1.0);

  v.assign(g.interior_count(), 0.0);
  v[g.index(3, 3, 3)] = 2.0;
  sums = rank_squared_sums(v, part, g);
  CHECK(sums[7] == 4.0);

  // Node 2 sits on the shared box face at coordinate 1/2 and belongs to
  // the lower-indexed box on every axis.
  v.assign(g.interior_count(), 0.0);
  v[g.index(2, 2, 2)] = 1.0;
  sums = rank_squared_sums(v, part, g);
  CHECK(sums[0] == 1.0);
  for (int p = 1; p < 8; ++p) CHECK(sums[p] == 0.0);
}

TEST_CASE("estimate tracks the true error within a constant band") {
  ExperimentConfig cfg;
  cfg.m0 = 4;
  cfg.levels = 3;
  const ExperimentContext ctx = build_context(cfg);
  const auto& systems = ctx.systems;
  const LevelSystem& fine = systems.back();

  MultigridWorkspace ws(systems);
  GridVector u(fine.size(), 0.0), r(fine.size());
  for (int iterate = 1; iterate <= 10; ++iterate) {
    v_cycle(systems, ws, u, ctx.rhs, cfg.sim.cycle, Mask::full());
    residual(fine, u, ctx.rhs, r);
    const HwReport rep = hw_estimate(systems, r, ctx.part, ws, cfg.sim.cycle);

    GridVector e(fine.size());
    for (std::int64_t i = 0; i < fine.size(); ++i)
      e[i] = u[i] - ctx.reference[i];
    const double err = discrete_norm(e);
    REQUIRE(err > 0.0);
    CHECK(rep.eta / err >= 1.0 / 3.0);
    CHECK(rep.eta / err <= 3.0);
  }
}

TEST_CASE("faulty indicator vanishes exactly at the exact solution") {
  const MeshHierarchy mesh = build_hierarchy(4, 1);
  const Partition part = build_partition(mesh, 2);
  const SubdomainSets sets =
      classify_subdomains(mesh, part, std::vector<int>{0});
  const auto systems = build_level_systems(mesh);
  const LevelSystem& fine = systems.back();

  const GridVector f = random_vector(fine.size(), 400);
  const Eigen::MatrixXd K = oracle::dense_stiffness(fine.grid.cells);
  const GridVector star =
      oracle::from_eigen(K.partialPivLu().solve(oracle::to_eigen(f)));

  MultigridWorkspace ws(systems);
  const double eta_f =
      hw_estimate_faulty(systems, star, f, sets, ws, CycleConfig{});
  CHECK(eta_f <= 1e-12);
}

TEST_CASE("faulty indicator matches the dense two-level computation") {
  // m0=2: the coarse faulty set is empty (every coarse node touches
  // cells of several ranks), exercising the degenerate bottom solve.
  // m0=4 and m0=8 have one and 27 coarse faulty nodes.
  for (int m0 : {2, 4, 8}) {
    const MeshHierarchy mesh = build_hierarchy(m0, 1);
    const Partition part = build_partition(mesh, 2);
    const SubdomainSets sets =
        classify_subdomains(mesh, part, std::vector<int>{0});
    const auto systems = build_level_systems(mesh);
    const LevelSystem& fine = systems.back();

    const GridVector u = random_vector(fine.size(), 500 + m0);
    const GridVector f = random_vector(fine.size(), 600 + m0);

    MultigridWorkspace ws(systems);
    CycleConfig cfg;
    cfg.coarse_iters = 60;  // drive the masked bottom solve to round-off
    const double got = hw_estimate_faulty(systems, u, f, sets, ws, cfg);

    const Eigen::MatrixXd K = oracle::dense_stiffness(fine.grid.cells);
    const Eigen::VectorXd rf =
        oracle::to_eigen(f) - K * oracle::to_eigen(u);
    std::vector<NodeClass> lab0(sets.labels[0].begin(), sets.labels[0].end());
    std::vector<NodeClass> lab1(sets.labels[1].begin(), sets.labels[1].end());
    const double expect = oracle::dense_faulty_indicator(
        mesh.grid(0), mesh.grid(1), lab0, lab1, rf);

    if (expect == 0.0)
      CHECK(got == 0.0);
    else
      CHECK(std::abs(got - expect) <= 1e-11 * expect);
  }
}

TEST_CASE("faulty indicator decreases over consecutive recovery cycles") {
  const MeshHierarchy mesh = build_hierarchy(4, 2);
  const Partition part = build_partition(mesh, 2);
  const SubdomainSets sets =
      classify_subdomains(mesh, part, std::vector<int>{0});
  const auto systems = build_level_systems(mesh);
  const LevelSystem& fine = systems.back();

  const GridVector f = random_vector(fine.size(), 700);
  MultigridWorkspace ws(systems);
  CycleConfig cfg;

  GridVector u(fine.size(), 0.0);
  for (int cycle = 0; cycle < 5; ++cycle)
    v_cycle(systems, ws, u, f, cfg, Mask::full());
  inject_fault(u, sets);

  const Mask mask = Mask::domain(sets, NodeClass::faulty_interior);
  double prev = hw_estimate_faulty(systems, u, f, sets, ws, cfg);
  REQUIRE(prev > 0.0);
  for (int cycle = 0; cycle < 8; ++cycle) {
    v_cycle(systems, ws, u, f, cfg, mask);
    const double cur = hw_estimate_faulty(systems, u, f, sets, ws, cfg);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("extreme eigenvalues match the dense spectrum") {
  for (int m0 : {2, 4}) {
    const MeshHierarchy mesh = build_hierarchy(m0, 1);
    const auto systems = build_level_systems(mesh);
    const EigBounds eig = estimate_eigs(systems, CycleConfig{});
    CHECK(eig.max_converged);
    CHECK(eig.min_converged);

    const Eigen::MatrixXd K = oracle::dense_stiffness(mesh.finest_grid().cells);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    CHECK(std::abs(eig.lambda_max - hi) <= 0.01 * hi);
    CHECK(std::abs(eig.lambda_min - lo) <= 0.01 * lo);
  }
}

TEST_CASE("the spectral spread grows about fourfold per level") {
  CycleConfig cfg;
  double prev_ratio = 0;
  for (int lev = 1; lev <= 3; ++lev) {
    const MeshHierarchy mesh = build_hierarchy(2, lev);
    const auto systems = build_level_systems(mesh);
    const EigBounds eig = estimate_eigs(systems, cfg);
    const double ratio = eig.lambda_max / eig.lambda_min;
    if (lev > 1) {
      const double growth = ratio / prev_ratio;
      CHECK(growth >= 3.0);
      CHECK(growth <= 5.0);
    }
    prev_ratio = ratio;
  }
}
