#pragma once

#include <span>
#include <vector>

#include "resmg/operators.hpp"

namespace resmg {

enum class SmootherKind {
  damped_jacobi,
  red_black_gauss_seidel,
  lexicographic_gauss_seidel,
};

// Defaults give V(3,3) with damped Jacobi.  Gauss-Seidel variants are
// available but converge so fast on these small cube problems (factors
// beyond 100 per cycle) that a solve bottoms out at machine precision
// within 6-7 cycles, leaving no usable iterate window for estimator
// studies or mid-solve fault scenarios.  Jacobi's factor of 15-25 per
// cycle keeps ten iterates above round-off.
struct CycleConfig {
  int pre_smooth = 3;
  int post_smooth = 3;
  SmootherKind smoother = SmootherKind::damped_jacobi;
  double omega = 0.8;    // damped Jacobi only
  int coarse_iters = 30; // PCG budget on level 0

  void validate() const;  // throws std::invalid_argument
};

// Updatable-node selection for the decoupled subdomain solves.  A full
// mask touches every interior node; otherwise only nodes of the given
// class are updated and all other values stay bitwise frozen (they still
// feed neighbor reads, which is how the frozen interface acts as
// Dirichlet data).
struct Mask {
  const SubdomainSets* sets = nullptr;
  NodeClass cls = NodeClass::healthy_interior;

  static Mask full() { return {}; }
  static Mask domain(const SubdomainSets& s, NodeClass c) { return {&s, c}; }

  bool is_full() const { return sets == nullptr; }
  MaskSpan level(int ell) const { return sets->labels[ell]; }
  std::int64_t active_count(int ell) const;
};

// Reusable per-level buffers for cycling and estimation; one instance per
// hierarchy, shared by all solver entry points.
struct MultigridWorkspace {
  std::vector<GridVector> u;    // corrections
  std::vector<GridVector> f;    // restricted right-hand sides / residuals
  std::vector<GridVector> r;    // residual scratch
  std::vector<GridVector> sum;  // hierarchical accumulation scratch

  explicit MultigridWorkspace(std::span<const LevelSystem> systems);
};

// One application of `sweeps` smoothing sweeps on u.  Gauss-Seidel runs
// in lexicographic order (red points first for the red-black variant),
// so results are deterministic.
void smooth(const LevelSystem& sys, GridVector& u, std::span<const double> f,
            const CycleConfig& cfg, int sweeps, const Mask& mask,
            GridVector& scratch);

// Jacobi-preconditioned CG on the coarsest level from a zero start.  Runs
// exactly `iters` iterations unless the residual drops below
// 1e-15*||f||; returns the number of iterations executed.  With a mask
// the iteration stays in the subspace of active nodes, i.e. it solves the
// principal submatrix system.
int pcg_coarse(const LevelSystem& sys, std::span<const double> f,
               GridVector& u, int iters, const Mask& mask);

// Multiplicative V(pre,post)-cycle over systems[0..L]; u and f live on
// the finest level.  Masked cycles realize the decoupled subdomain
// hierarchies: smoothing, residuals and transfers are restricted to the
// active class on every level.
void v_cycle(std::span<const LevelSystem> systems, MultigridWorkspace& ws,
             GridVector& u, std::span<const double> f, const CycleConfig& cfg,
             const Mask& mask);

// Down-branch only: pre-smoothing and restriction to the coarsest level,
// coarse solve, then straight prolongation of the corrections to the
// finest level without intermediate post-smoothing.  Used when a domain
// must surface its current state as quickly as possible; accounted as
// half an iteration.
void half_cycle_down(std::span<const LevelSystem> systems,
                     MultigridWorkspace& ws, GridVector& u,
                     std::span<const double> f, const CycleConfig& cfg,
                     const Mask& mask);

}  // namespace resmg
