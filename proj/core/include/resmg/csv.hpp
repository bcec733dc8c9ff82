#pragma once

#include <span>
#include <string>

#include "resmg/fault.hpp"

namespace resmg {

// All floating point columns are printed with 17 significant digits so
// values round-trip exactly and repeated runs diff clean.
std::string fmt17(double v);

std::string to_string(TraceEvent ev);

// Result tables.  Rows appear in run order, then in row order within a
// run, so files from identical configurations are byte identical.
//
//   trace.csv        run_id,iter,sim_time,eta_global,res_norm,err_norm,event
//   events.csv       run_id,event_idx,k_F,bound_kind,kappa,eta_s,sigma,
//                    n_F,n_I,eta_F_final,recovery_sim_time
//   rank_contrib.csv run_id,iter,rank,n_p,eta_p
//   summary.csv      run_id,variant,iterations_total,sim_time_total,
//                    delay_iters,delay_time
//
// Delays are measured against the fault-free run in the same batch; they
// are zero when no fault-free baseline is present.
void write_report_tables(const std::string& out_dir,
                         std::span<const SimulationReport> reports);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace resmg
