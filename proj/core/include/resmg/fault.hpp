#pragma once

#include <optional>
#include <string>
#include <vector>

#include "resmg/estimator.hpp"

namespace resmg {

enum class BoundKind { grb, lrb };

// One rank crash: hits after `after_cycle` completed global cycles, wipes
// the finest-level values owned strictly inside the given rank boxes.
// The interface layer survives through neighbor ghost copies.
struct FaultEvent {
  int after_cycle = 0;
  std::vector<int> faulty_ranks;
  double superman = 2.0;  // processing speedup of the recovery domain
};

// Deterministic stand-in for wall-clock time: a domain's V-cycle costs
// its fine-level DOF count times unit_work.  Faulty-domain cycles carry
// the subdomain estimate on top (overhead fraction) and are divided by
// the superman factor.  Direct cost overrides replace the DOF-derived
// values when set.
struct CostModel {
  double unit_work = 1.0;
  // Estimate-to-cycle cost ratio of the recovery domain, measured on the
  // reference machine configuration this model is calibrated against.
  double estimator_overhead = 0.43 / 1.01;
  std::optional<double> global_cycle_cost;
  std::optional<double> healthy_cycle_cost;
  std::optional<double> faulty_cycle_cost;

  double global_cycle(std::int64_t dofs) const {
    return global_cycle_cost.value_or(static_cast<double>(dofs) * unit_work);
  }
  double healthy_cycle(std::int64_t dofs) const {
    return healthy_cycle_cost.value_or(static_cast<double>(dofs) * unit_work);
  }
  double faulty_cycle(std::int64_t dofs, double superman) const {
    const double base =
        faulty_cycle_cost.value_or(static_cast<double>(dofs) * unit_work);
    return (1.0 + estimator_overhead) * base / superman;
  }
};

struct FaultScenario {
  std::vector<FaultEvent> events;  // strictly increasing after_cycle
  BoundKind bound = BoundKind::lrb;
  double kappa = 1.0;
  CostModel cost;

  // Throws std::invalid_argument on overlapping events, bad ranks,
  // kappa <= 0 or superman < 1.
  void validate(const Partition& part) const;
};

// Re-coupling target from the per-rank contributions cached at the crash
// iterate.  GRB aggregates all surviving ranks, LRB takes the worst one;
// always lrb <= grb <= sqrt(P-1) * lrb.  Throws if the bound is not
// positive.
double recoupling_bound(BoundKind kind, const HwReport& cached,
                        std::span<const int> faulty_ranks);

// Zero the finest-level values strictly inside the faulty region.
// Interface and healthy values are bitwise untouched.
void inject_fault(GridVector& u, const SubdomainSets& sets);

struct RecoveryOutcome {
  int event_index = 0;
  int after_cycle = 0;
  BoundKind bound = BoundKind::lrb;
  double kappa = 0;
  double superman = 1;
  double sigma = 0;
  int faulty_cycles = 0;      // n_F
  double healthy_cycles = 0;  // n_I, quantized to halves
  double eta_f_final = 0;
  double sim_time = 0;  // span of the decoupled phase
};

enum class TraceEvent { none, fault, recovery_start, recouple };

struct TraceRow {
  double iter = 0;
  double sim_time = 0;
  double eta = 0;
  double res_norm = 0;
  double err_norm = 0;  // NaN when no reference is available
  TraceEvent event = TraceEvent::none;
};

struct RankSnapshot {
  double iter = 0;
  std::vector<std::int64_t> rank_nodes;
  std::vector<double> rank_eta;
};

enum class RunMode { fault_free, no_recovery, recovery };

struct SimulationReport {
  std::string run_id;
  RunMode mode = RunMode::fault_free;
  bool converged = false;
  double iterations = 0;  // fractional once a recovery contributed halves
  double sim_time = 0;
  double eta0 = 0;
  std::vector<TraceRow> trace;
  std::vector<RecoveryOutcome> recoveries;
  std::vector<RankSnapshot> snapshots;
};

struct SimProblem {
  const MeshHierarchy* mesh = nullptr;
  std::span<const LevelSystem> systems;
  const Partition* part = nullptr;
  std::span<const double> rhs;
  std::span<const double> reference;  // exact discrete solution, optional
};

struct SimConfig {
  CycleConfig cycle;
  int faulty_coarse_iters = 10;  // coarse PCG budget inside the faulty hierarchy
  double tol = 1e-13;            // stop when eta < tol * eta0
  int max_cycles = 100;
  int max_recovery_cycles = 50;
  std::vector<double> snapshot_iters;

  void validate() const;
};

// Decoupled solve of the crashed region with the interface frozen at its
// pre-fault values: masked V-cycles on I_F until the subdomain indicator
// drops below kappa * sigma, while the healthy domain is credited with
// masked cycles on I_I in half-cycle quanta under the cost model.  On the
// re-coupling signal the healthy domain finishes its current half via the
// down-branch and both domains merge.  The masked writes are disjoint, so
// running the two domains back to back is equivalent to interleaving
// them; asynchrony lives entirely in the simulated clock.
RecoveryOutcome run_recovery(const SimProblem& problem, GridVector& u,
                             const SubdomainSets& sets,
                             const FaultScenario& scenario,
                             const FaultEvent& event, int event_index,
                             double sigma, const SimConfig& cfg,
                             MultigridWorkspace& ws);

// Full simulated run: V-cycles with an estimate after each, per-rank
// contributions cached at every iterate, fault events injected at their
// trigger cycles and (mode permitting) recovered adaptively.  Stops when
// eta < tol * eta0 or the cycle cap is hit.
SimulationReport solve_with_resilience(const SimProblem& problem,
                                       const FaultScenario& scenario,
                                       RunMode mode, const SimConfig& cfg,
                                       std::string run_id);

}  // namespace resmg
