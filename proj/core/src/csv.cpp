#include "resmg/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "resmg/config.hpp"

namespace resmg {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_string(TraceEvent ev) {
  switch (ev) {
    case TraceEvent::none: return "none";
    case TraceEvent::fault: return "fault";
    case TraceEvent::recovery_start: return "recovery-start";
    case TraceEvent::recouple: return "recouple";
  }
  return "?";
}

namespace {

std::string variant_name(RunMode mode) {
  switch (mode) {
    case RunMode::fault_free: return "fault-free";
    case RunMode::no_recovery: return "no-recovery";
    case RunMode::recovery: return "recovery";
  }
  return "?";
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

void write_report_tables(const std::string& out_dir,
                         std::span<const SimulationReport> reports) {
  const SimulationReport* fault_free = nullptr;
  for (const SimulationReport& rep : reports)
    if (rep.mode == RunMode::fault_free && !fault_free) fault_free = &rep;

  std::ofstream trace = open_out(out_dir, "trace.csv");
  trace << "run_id,iter,sim_time,eta_global,res_norm,err_norm,event\n";
  for (const SimulationReport& rep : reports)
    for (const TraceRow& row : rep.trace)
      trace << rep.run_id << ',' << fmt17(row.iter) << ',' << fmt17(row.sim_time)
            << ',' << fmt17(row.eta) << ',' << fmt17(row.res_norm) << ','
            << fmt17(row.err_norm) << ',' << to_string(row.event) << '\n';

  std::ofstream events = open_out(out_dir, "events.csv");
  events << "run_id,event_idx,k_F,bound_kind,kappa,eta_s,sigma,n_F,n_I,"
            "eta_F_final,recovery_sim_time\n";
  for (const SimulationReport& rep : reports)
    for (const RecoveryOutcome& rec : rep.recoveries)
      events << rep.run_id << ',' << rec.event_index << ',' << rec.after_cycle
             << ',' << to_string(rec.bound) << ',' << fmt17(rec.kappa) << ','
             << fmt17(rec.superman) << ',' << fmt17(rec.sigma) << ','
             << rec.faulty_cycles << ',' << fmt17(rec.healthy_cycles) << ','
             << fmt17(rec.eta_f_final) << ',' << fmt17(rec.sim_time) << '\n';

  std::ofstream ranks = open_out(out_dir, "rank_contrib.csv");
  ranks << "run_id,iter,rank,n_p,eta_p\n";
  for (const SimulationReport& rep : reports)
    for (const RankSnapshot& snap : rep.snapshots)
      for (std::size_t p = 0; p < snap.rank_eta.size(); ++p)
        ranks << rep.run_id << ',' << fmt17(snap.iter) << ',' << p << ','
              << snap.rank_nodes[p] << ',' << fmt17(snap.rank_eta[p]) << '\n';

  std::ofstream summary = open_out(out_dir, "summary.csv");
  summary << "run_id,variant,iterations_total,sim_time_total,delay_iters,"
             "delay_time\n";
  for (const SimulationReport& rep : reports) {
    const double base_iters = fault_free ? fault_free->iterations : rep.iterations;
    const double base_time = fault_free ? fault_free->sim_time : rep.sim_time;
    summary << rep.run_id << ',' << variant_name(rep.mode) << ','
            << fmt17(rep.iterations) << ',' << fmt17(rep.sim_time) << ','
            << fmt17(rep.iterations - base_iters) << ','
            << fmt17(rep.sim_time - base_time) << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  const auto dir = std::filesystem::path(path).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace resmg
