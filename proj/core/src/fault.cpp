#include "resmg/fault.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace resmg {

void FaultScenario::validate(const Partition& part) const {
  if (kappa <= 0.0)
    throw std::invalid_argument("scenario: safety factor kappa must be positive");
  if (cost.estimator_overhead < 0.0)
    throw std::invalid_argument("scenario: estimator overhead must be nonnegative");
  if (cost.unit_work <= 0.0)
    throw std::invalid_argument("scenario: unit work must be positive");
  int prev = 0;
  for (const FaultEvent& ev : events) {
    if (ev.after_cycle < 1)
      throw std::invalid_argument("scenario: fault trigger cycle must be >= 1");
    if (ev.after_cycle <= prev)
      throw std::invalid_argument(
          "scenario: fault events must be strictly ordered, overlapping "
          "recoveries are not supported");
    prev = ev.after_cycle;
    if (ev.superman < 1.0)
      throw std::invalid_argument("scenario: superman factor must be >= 1");
    // Delegates rank validation (range, duplicates, proper subset).
    (void)part;
  }
}

void SimConfig::validate() const {
  cycle.validate();
  if (faulty_coarse_iters < 1)
    throw std::invalid_argument("sim: faulty coarse PCG budget must be positive");
  if (tol <= 0.0 || tol >= 1.0)
    throw std::invalid_argument("sim: relative tolerance must be in (0, 1)");
  if (max_cycles < 1 || max_recovery_cycles < 1)
    throw std::invalid_argument("sim: cycle caps must be positive");
}

double recoupling_bound(BoundKind kind, const HwReport& cached,
                        std::span<const int> faulty_ranks) {
  std::vector<char> faulty(cached.rank_eta.size(), 0);
  for (int r : faulty_ranks) faulty[r] = 1;
  double acc = 0;
  for (std::size_t p = 0; p < cached.rank_eta.size(); ++p) {
    if (faulty[p]) continue;
    const double term =
        static_cast<double>(cached.rank_nodes[p]) * cached.rank_eta[p] * cached.rank_eta[p];
    if (kind == BoundKind::grb)
      acc += term;
    else
      acc = std::max(acc, term);
  }
  const double sigma = std::sqrt(acc);
  if (!(sigma > 0.0))
    throw std::runtime_error(
        "recoupling: surviving contributions give no positive target");
  return sigma;
}

void inject_fault(GridVector& u, const SubdomainSets& sets) {
  const int top = static_cast<int>(sets.labels.size()) - 1;
  MaskSpan lab = sets.level(top);
  for (std::size_t i = 0; i < u.size(); ++i)
    if (lab[i] == NodeClass::faulty_interior) u[i] = 0.0;
}

RecoveryOutcome run_recovery(const SimProblem& problem, GridVector& u,
                             const SubdomainSets& sets,
                             const FaultScenario& scenario,
                             const FaultEvent& event, int event_index,
                             double sigma, const SimConfig& cfg,
                             MultigridWorkspace& ws) {
  const int top = static_cast<int>(problem.systems.size()) - 1;

  RecoveryOutcome out;
  out.event_index = event_index;
  out.after_cycle = event.after_cycle;
  out.bound = scenario.bound;
  out.kappa = scenario.kappa;
  out.superman = event.superman;
  out.sigma = sigma;

  CycleConfig faulty_cfg = cfg.cycle;
  faulty_cfg.coarse_iters = cfg.faulty_coarse_iters;
  const Mask faulty_mask = Mask::domain(sets, NodeClass::faulty_interior);
  const Mask healthy_mask = Mask::domain(sets, NodeClass::healthy_interior);

  const double target = scenario.kappa * sigma;
  double eta_f = std::numeric_limits<double>::infinity();
  while (eta_f >= target) {
    if (out.faulty_cycles >= cfg.max_recovery_cycles)
      throw std::runtime_error(
          "recovery: faulty subdomain failed to reach the re-coupling target "
          "within the cycle cap");
    v_cycle(problem.systems, ws, u, problem.rhs, faulty_cfg, faulty_mask);
    eta_f = hw_estimate_faulty(problem.systems, u, problem.rhs, sets, ws,
                               faulty_cfg);
    ++out.faulty_cycles;
  }
  out.eta_f_final = eta_f;

  // Healthy progress under the simulated clock: full cycles that finished
  // before the signal, plus the down-branch of the cycle in flight.
  const double t_faulty = scenario.cost.faulty_cycle(sets.faulty_count[top],
                                                     event.superman);
  const double t_healthy = scenario.cost.healthy_cycle(sets.healthy_count[top]);
  const double elapsed = out.faulty_cycles * t_faulty;
  const double raw = elapsed / t_healthy;
  const double full = std::floor(raw);
  out.healthy_cycles = full + (raw > full ? 0.5 : 0.0);

  for (int c = 0; c < static_cast<int>(full); ++c)
    v_cycle(problem.systems, ws, u, problem.rhs, cfg.cycle, healthy_mask);
  if (raw > full)
    half_cycle_down(problem.systems, ws, u, problem.rhs, cfg.cycle,
                    healthy_mask);

  // Re-coupling waits for whichever domain finishes later; completing a
  // half begun just before the signal can push past the faulty clock.
  out.sim_time = std::max(elapsed, out.healthy_cycles * t_healthy);
  return out;
}

namespace {

double error_norm(const SimProblem& problem, const GridVector& u) {
  if (problem.reference.empty())
    return std::numeric_limits<double>::quiet_NaN();
  double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = problem.reference[i] - u[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(u.size()));
}

bool snapshot_requested(const std::vector<double>& wanted, double iter) {
  for (double w : wanted)
    if (std::abs(w - iter) < 1e-9) return true;
  return false;
}

}  // namespace

SimulationReport solve_with_resilience(const SimProblem& problem,
                                       const FaultScenario& scenario,
                                       RunMode mode, const SimConfig& cfg,
                                       std::string run_id) {
  cfg.validate();
  scenario.validate(*problem.part);

  const int top = static_cast<int>(problem.systems.size()) - 1;
  const LevelSystem& fine = problem.systems[top];
  const std::int64_t n = fine.size();

  SimulationReport rep;
  rep.run_id = std::move(run_id);
  rep.mode = mode;

  MultigridWorkspace ws(problem.systems);
  GridVector u(n, 0.0), r(n);

  const auto estimate = [&](std::span<const double> res) {
    return hw_estimate(problem.systems, res, *problem.part, ws, cfg.cycle);
  };
  const auto push_row = [&](double iter, double time, double eta,
                            TraceEvent ev) {
    TraceRow row;
    row.iter = iter;
    row.sim_time = time;
    row.eta = eta;
    row.res_norm = discrete_norm(r);
    row.err_norm = error_norm(problem, u);
    row.event = ev;
    rep.trace.push_back(row);
  };
  const auto snapshot = [&](double iter, const HwReport& hw) {
    rep.snapshots.push_back({iter, hw.rank_nodes, hw.rank_eta});
  };

  residual(fine, u, problem.rhs, r);
  HwReport cached = estimate(r);
  cached.iterate = 0;
  rep.eta0 = cached.eta;
  double sim_time = 0;
  push_row(0, 0, cached.eta, TraceEvent::none);
  if (snapshot_requested(cfg.snapshot_iters, 0)) snapshot(0, cached);

  const double t_global = scenario.cost.global_cycle(n);
  double credit = 0;  // fractional iterations contributed by recoveries
  std::size_t next_event = mode == RunMode::fault_free ? scenario.events.size() : 0;

  for (int cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
    v_cycle(problem.systems, ws, u, problem.rhs, cfg.cycle, Mask::full());
    sim_time += t_global;
    residual(fine, u, problem.rhs, r);
    const double iter_now = cycle + credit;

    if (next_event < scenario.events.size() &&
        scenario.events[next_event].after_cycle == cycle) {
      const FaultEvent& ev = scenario.events[next_event];
      const int event_index = static_cast<int>(next_event);
      ++next_event;

      // The estimate completes before the crash; its per-rank pieces are
      // the only state the bound may use afterwards.
      HwReport pre_fault = estimate(r);
      pre_fault.iterate = iter_now;
      snapshot(iter_now, pre_fault);

      const SubdomainSets sets =
          classify_subdomains(*problem.mesh, *problem.part, ev.faulty_ranks);
      inject_fault(u, sets);
      residual(fine, u, problem.rhs, r);
      // Diagnostic re-estimate to expose the induced jump in the trace;
      // the controller itself never sees it.
      push_row(iter_now, sim_time, estimate(r).eta, TraceEvent::fault);

      if (mode == RunMode::recovery) {
        const double sigma =
            recoupling_bound(scenario.bound, pre_fault, ev.faulty_ranks);
        RecoveryOutcome rec = run_recovery(problem, u, sets, scenario, ev,
                                           event_index, sigma, cfg, ws);
        credit += rec.healthy_cycles;
        sim_time += rec.sim_time;
        rep.recoveries.push_back(rec);

        residual(fine, u, problem.rhs, r);
        cached = estimate(r);
        cached.iterate = cycle + credit;
        push_row(cycle + credit, sim_time, cached.eta, TraceEvent::recouple);
        snapshot(cycle + credit, cached);
        if (cached.eta < cfg.tol * rep.eta0) {
          rep.converged = true;
        }
      }
    } else {
      cached = estimate(r);
      cached.iterate = iter_now;
      push_row(iter_now, sim_time, cached.eta, TraceEvent::none);
      if (snapshot_requested(cfg.snapshot_iters, iter_now))
        snapshot(iter_now, cached);
      if (cached.eta < cfg.tol * rep.eta0) rep.converged = true;
    }

    rep.iterations = cycle + credit;
    rep.sim_time = sim_time;
    if (rep.converged) break;
  }
  return rep;
}

}  // namespace resmg
