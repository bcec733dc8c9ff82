#pragma once

#include <span>
#include <vector>

#include "resmg/solver.hpp"

namespace resmg {

// Discrete L2 norm with 1/n weighting, ||v||^2 = (1/n) sum v_i^2.
double discrete_norm(std::span<const double> v);

// Same norm over the nodes of one class, weighted by 1/|class|.
double discrete_norm_class(std::span<const double> v, MaskSpan labels,
                           NodeClass cls, std::int64_t count);

// Per-rank sums of squared entries on one level, in rank order.
std::vector<double> rank_squared_sums(std::span<const double> v,
                                      const Partition& part,
                                      const LevelGrid& grid);

// Result of one hierarchical error estimate.  eta is the global value;
// rank_eta[p] is the contribution of rank p under 1/n_p weighting, so
// n * eta^2 == sum_p n_p * rank_eta[p]^2 exactly (up to summation-order
// round-off).  The per-rank values are what survives a crash: they are
// cached by the simulation at every iterate so that re-coupling bounds
// can be formed later without checkpointing.
struct HwReport {
  double iterate = 0;
  double eta = 0;
  std::vector<double> rank_eta;
  std::vector<std::int64_t> rank_nodes;  // owned finest-level counts
  GridVector field;  // point-wise hierarchical sum, kept on request
};

// Hierarchically weighted estimate of the algebraic error from the
// finest-level residual r: restrict r through all levels, scale each
// level by the inverse operator diagonal (the full coarse inverse on
// level 0, by the same budgeted PCG as the cycle), and accumulate the
// prolongated sum upward in one pass.  eta is the discrete L2 norm of
// the accumulated field.
HwReport hw_estimate(std::span<const LevelSystem> systems,
                     std::span<const double> r_fine, const Partition& part,
                     MultigridWorkspace& ws, const CycleConfig& cfg,
                     bool keep_field = false);

// Faulty-subdomain variant: residuals, transfers and diagonal scaling are
// restricted to the faulty-interior class on every level, with the frozen
// interface acting as zero Dirichlet data; the coarsest block is the
// principal submatrix, inverted by masked PCG.  Returns the plain
// Euclidean norm of the accumulated field over I_F, which equals the
// n_F-weighted subdomain indicator.  Uses no information from outside
// the faulty subdomain and its interface.
double hw_estimate_faulty(std::span<const LevelSystem> systems,
                          const GridVector& u, std::span<const double> f,
                          const SubdomainSets& sets, MultigridWorkspace& ws,
                          const CycleConfig& cfg);

// Extreme eigenvalues of the finest operator: lambda_max by power
// iteration, lambda_min by inverse iteration with heavily converged
// V-cycles as the inner solver.  Iteration caps are fixed; converged
// flags report whether the last two Rayleigh quotients agree to 1%.
// For this discretization lambda_min = O(h^3) and lambda_max = O(h), so
// their ratio grows by about 4x per refinement level.
struct EigBounds {
  double lambda_max = 0;
  double lambda_min = 0;
  bool max_converged = false;
  bool min_converged = false;
};

EigBounds estimate_eigs(std::span<const LevelSystem> systems,
                        const CycleConfig& cfg, int max_iters = 200,
                        std::uint64_t seed = 0x9e37u);

}  // namespace resmg
