#pragma once

#include <string>
#include <vector>

#include "tac/diagnostics.hpp"
#include "tac/solvers.hpp"

namespace tac {

/// Shortest round-trip decimal representation ("%.17g"); fixed so that
/// repeated runs produce bit-identical CSV files.
std::string fmt_double(double v);

void write_trajectory_csv(const std::string& path, const Simulator& sim, const RunResult& run);
void write_ledger_csv(const std::string& path, const std::vector<LedgerRow>& rows);
void write_monitors_csv(const std::string& path, const EstimateMonitors& m);
void write_cauchy_csv(const std::string& path, const std::vector<CauchyRow>& rows);

/// Field snapshots. Bulk: "node,x,y,theta,u_x,u_y"; surface:
/// "x,theta_s,chi,u_N,udot_T,z,R_mag".
void write_bulk_snapshot(const std::string& path, const Simulator& sim, const State& s);
void write_surface_snapshot(const std::string& path, const Simulator& sim, const State& s);

}  // namespace tac
