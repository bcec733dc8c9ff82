#pragma once

#include <optional>
#include <string>

#include "resmg/fault.hpp"

namespace resmg {

// Everything one experiment needs; loadable from a JSON file, with the
// common command line flags layered on top.  The fault scenario can be
// given inline under "scenario" or as a path to a separate scenario file.
struct ExperimentConfig {
  std::string problem = "cube-sin";
  int m0 = 8;
  int levels = 4;
  int p_axis = 2;
  std::uint64_t seed = 42;
  SimConfig sim;
  FaultScenario scenario;
  bool baseline_fault_free = true;
  bool baseline_no_recovery = true;
  int field_iterate = 5;  // estimator-study field export iterate
  std::string out_dir = "out";
};

// Command line overrides; unset fields keep the config value.
struct ConfigOverrides {
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::optional<int> m0;
  std::optional<int> levels;
  std::optional<int> p_axis;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> problem;
};

// Throws std::invalid_argument on malformed files or unknown fields that
// would silently change behavior (smoother names, bound kinds).
ExperimentConfig load_experiment_config(const std::string& path);
FaultScenario load_scenario_file(const std::string& path);

ExperimentConfig make_config(const ConfigOverrides& overrides);

// Effective-config dump written next to the result tables so a run can be
// reproduced from its output directory alone.
std::string describe_config(const ExperimentConfig& cfg);

std::string to_string(BoundKind kind);
BoundKind bound_from_string(const std::string& s);
std::string to_string(SmootherKind kind);
SmootherKind smoother_from_string(const std::string& s);

}  // namespace resmg
