#pragma once

#include "resmg/config.hpp"
#include "resmg/csv.hpp"
#include "resmg/problems.hpp"

namespace resmg {

// Hierarchy, partition, operators, load vector and reference solution for
// one experiment configuration, built once and shared across runs.
struct ExperimentContext {
  MeshHierarchy mesh;
  Partition part;
  std::vector<LevelSystem> systems;
  ProblemSetup problem;
  GridVector rhs;
  GridVector reference;

  SimProblem sim_problem() const {
    return {&mesh, systems, &part, rhs, reference};
  }
};

ExperimentContext build_context(const ExperimentConfig& cfg,
                                bool with_reference = true);

// Reference discrete solution by over-solving: cycles to the numerical
// fixed point (stops when the per-cycle update loses contraction or
// after 200 cycles), then verifies ||r|| <= 1e-12 * ||f|| and throws if
// the solve stagnated above that.
GridVector make_reference(std::span<const LevelSystem> systems,
                          std::span<const double> rhs,
                          const CycleConfig& cfg);

// Study drivers behind the command line subcommands.  Each writes the
// four result tables plus the effective configuration into cfg.out_dir;
// estimator-study additionally writes estimator_study.csv (per-iterate
// estimate against true error and eigenvalue envelopes) and hw_field.csv
// (point-wise hierarchical sum at one iterate).
void run_solve(const ExperimentConfig& cfg);
void run_faulty(const ExperimentConfig& cfg);
void run_sweep_kappa(const ExperimentConfig& cfg);
void run_estimator_study(const ExperimentConfig& cfg);
void run_multi_fault(const ExperimentConfig& cfg);

// Scenario presets used when no config file provides one.
FaultScenario desk_single_fault();
FaultScenario desk_double_fault();

}  // namespace resmg
