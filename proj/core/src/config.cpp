#include "resmg/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace resmg {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

CostModel cost_from_json(const json& j) {
  CostModel cost;
  cost.unit_work = j.value("unit_work", cost.unit_work);
  cost.estimator_overhead = j.value("epsilon", cost.estimator_overhead);
  if (j.contains("global_cycle_cost"))
    cost.global_cycle_cost = j.at("global_cycle_cost").get<double>();
  if (j.contains("healthy_cycle_cost"))
    cost.healthy_cycle_cost = j.at("healthy_cycle_cost").get<double>();
  if (j.contains("faulty_cycle_cost"))
    cost.faulty_cycle_cost = j.at("faulty_cycle_cost").get<double>();
  return cost;
}

FaultScenario scenario_from_json(const json& j) {
  FaultScenario sc;
  if (j.contains("bound")) sc.bound = bound_from_string(j.at("bound").get<std::string>());
  sc.kappa = j.value("kappa", sc.kappa);
  if (j.contains("epsilon")) sc.cost.estimator_overhead = j.at("epsilon").get<double>();
  if (j.contains("cost")) {
    const double eps = sc.cost.estimator_overhead;
    sc.cost = cost_from_json(j.at("cost"));
    if (!j.at("cost").contains("epsilon")) sc.cost.estimator_overhead = eps;
  }
  for (const json& je : j.value("events", json::array())) {
    FaultEvent ev;
    ev.after_cycle = je.at("after_cycle").get<int>();
    ev.faulty_ranks = je.at("faulty_ranks").get<std::vector<int>>();
    ev.superman = je.value("superman", ev.superman);
    sc.events.push_back(std::move(ev));
  }
  return sc;
}

void apply_json(ExperimentConfig& cfg, const json& j, const std::string& path) {
  cfg.problem = j.value("problem", cfg.problem);
  cfg.m0 = j.value("m0", cfg.m0);
  cfg.levels = j.value("levels", cfg.levels);
  cfg.p_axis = j.value("p_axis", cfg.p_axis);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.sim.tol = j.value("tol", cfg.sim.tol);
  cfg.sim.max_cycles = j.value("max_cycles", cfg.sim.max_cycles);
  cfg.sim.max_recovery_cycles =
      j.value("max_recovery_cycles", cfg.sim.max_recovery_cycles);
  cfg.sim.faulty_coarse_iters =
      j.value("faulty_coarse_iters", cfg.sim.faulty_coarse_iters);
  if (j.contains("snapshot_iters"))
    cfg.sim.snapshot_iters = j.at("snapshot_iters").get<std::vector<double>>();
  cfg.field_iterate = j.value("field_iterate", cfg.field_iterate);
  cfg.out_dir = j.value("out", cfg.out_dir);

  if (j.contains("cycle")) {
    const json& jc = j.at("cycle");
    CycleConfig& cy = cfg.sim.cycle;
    cy.pre_smooth = jc.value("pre_smooth", cy.pre_smooth);
    cy.post_smooth = jc.value("post_smooth", cy.post_smooth);
    cy.omega = jc.value("omega", cy.omega);
    cy.coarse_iters = jc.value("coarse_iters", cy.coarse_iters);
    if (jc.contains("smoother"))
      cy.smoother = smoother_from_string(jc.at("smoother").get<std::string>());
  }

  if (j.contains("baselines")) {
    const json& jb = j.at("baselines");
    cfg.baseline_fault_free = jb.value("fault_free", cfg.baseline_fault_free);
    cfg.baseline_no_recovery = jb.value("no_recovery", cfg.baseline_no_recovery);
  }

  if (j.contains("scenario")) {
    const json& js = j.at("scenario");
    if (js.is_string()) {
      std::string sp = js.get<std::string>();
      // Relative scenario paths resolve against the config file location.
      if (!sp.empty() && sp.front() != '/' && path.find('/') != std::string::npos)
        sp = path.substr(0, path.rfind('/') + 1) + sp;
      cfg.scenario = load_scenario_file(sp);
    } else {
      cfg.scenario = scenario_from_json(js);
    }
  }
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  ExperimentConfig cfg;
  apply_json(cfg, parse_file(path), path);
  return cfg;
}

FaultScenario load_scenario_file(const std::string& path) {
  return scenario_from_json(parse_file(path));
}

ExperimentConfig make_config(const ConfigOverrides& o) {
  ExperimentConfig cfg;
  if (o.config_path) cfg = load_experiment_config(*o.config_path);
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.m0) cfg.m0 = *o.m0;
  if (o.levels) cfg.levels = *o.levels;
  if (o.p_axis) cfg.p_axis = *o.p_axis;
  if (o.tol) cfg.sim.tol = *o.tol;
  if (o.seed) cfg.seed = *o.seed;
  if (o.problem) cfg.problem = *o.problem;
  return cfg;
}

std::string describe_config(const ExperimentConfig& cfg) {
  json j;
  j["problem"] = cfg.problem;
  j["m0"] = cfg.m0;
  j["levels"] = cfg.levels;
  j["p_axis"] = cfg.p_axis;
  j["seed"] = cfg.seed;
  j["tol"] = cfg.sim.tol;
  j["max_cycles"] = cfg.sim.max_cycles;
  j["faulty_coarse_iters"] = cfg.sim.faulty_coarse_iters;
  j["cycle"] = {{"pre_smooth", cfg.sim.cycle.pre_smooth},
                {"post_smooth", cfg.sim.cycle.post_smooth},
                {"smoother", to_string(cfg.sim.cycle.smoother)},
                {"omega", cfg.sim.cycle.omega},
                {"coarse_iters", cfg.sim.cycle.coarse_iters}};
  json events = json::array();
  for (const FaultEvent& ev : cfg.scenario.events)
    events.push_back({{"after_cycle", ev.after_cycle},
                      {"faulty_ranks", ev.faulty_ranks},
                      {"superman", ev.superman}});
  j["scenario"] = {{"bound", to_string(cfg.scenario.bound)},
                   {"kappa", cfg.scenario.kappa},
                   {"epsilon", cfg.scenario.cost.estimator_overhead},
                   {"events", events}};
  return j.dump(2) + "\n";
}

std::string to_string(BoundKind kind) {
  return kind == BoundKind::grb ? "GRB" : "LRB";
}

BoundKind bound_from_string(const std::string& s) {
  if (s == "GRB" || s == "grb") return BoundKind::grb;
  if (s == "LRB" || s == "lrb") return BoundKind::lrb;
  throw std::invalid_argument("unknown re-coupling bound kind: " + s);
}

std::string to_string(SmootherKind kind) {
  switch (kind) {
    case SmootherKind::damped_jacobi: return "jacobi";
    case SmootherKind::red_black_gauss_seidel: return "red-black-gs";
    case SmootherKind::lexicographic_gauss_seidel: return "lex-gs";
  }
  return "?";
}

SmootherKind smoother_from_string(const std::string& s) {
  if (s == "jacobi") return SmootherKind::damped_jacobi;
  if (s == "red-black-gs") return SmootherKind::red_black_gauss_seidel;
  if (s == "lex-gs") return SmootherKind::lexicographic_gauss_seidel;
  throw std::invalid_argument("unknown smoother: " + s);
}

}  // namespace resmg
