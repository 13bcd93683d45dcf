#include "tac/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tac {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("io: cannot open '" + path + "' for writing");
  return os;
}

}  // namespace

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(const std::string& path, const Simulator& sim, const RunResult& run) {
  auto os = open_out(path);
  os << "step,t,substeps,outer_iters,mom_newton,mom_proj,adh_newton,th_newton,"
        "res_mom,res_proj,res_adh,res_th_bulk,res_th_surf,outer_update,min_theta,"
        "signorini_r1,signorini_r2,signorini_r3,max_abs_z,min_mu_udot\n";
  for (size_t n = 1; n < run.trajectory.size(); ++n) {
    const State& s = run.trajectory[n];
    const StepReport& r = run.reports[n - 1];
    const auto sig = signorini_residual(sim, s);
    const auto cou = coulomb_residual(sim, s);
    os << n << ',' << fmt_double(s.t) << ',' << r.substeps << ',' << r.outer_iters << ','
       << r.momentum_newton_iters << ',' << r.momentum_proj_iters << ','
       << r.adhesion_newton_iters << ',' << r.thermal_newton_iters << ','
       << fmt_double(r.res_momentum) << ',' << fmt_double(r.res_proj) << ','
       << fmt_double(r.res_adhesion) << ',' << fmt_double(r.res_theta_bulk) << ','
       << fmt_double(r.res_theta_surf) << ',' << fmt_double(r.outer_update) << ','
       << fmt_double(r.min_theta) << ',' << fmt_double(sig.r1) << ',' << fmt_double(sig.r2)
       << ',' << fmt_double(sig.r3) << ',' << fmt_double(cou.max_abs_z) << ','
       << fmt_double(cou.min_mu_udot) << '\n';
  }
}

void write_ledger_csv(const std::string& path, const std::vector<LedgerRow>& rows) {
  auto os = open_out(path);
  const auto names = ledger_column_names();
  os << "step";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (size_t i = 0; i < rows.size(); ++i) {
    os << i;
    for (double v : ledger_row_values(rows[i])) os << ',' << fmt_double(v);
    os << '\n';
  }
}

void write_monitors_csv(const std::string& path, const EstimateMonitors& m) {
  auto os = open_out(path);
  const auto vals = monitor_values(m);
  for (size_t i = 0; i < vals.size(); ++i) os << (i ? "," : "") << vals[i].first;
  os << '\n';
  for (size_t i = 0; i < vals.size(); ++i) os << (i ? "," : "") << fmt_double(vals[i].second);
  os << '\n';
}

void write_cauchy_csv(const std::string& path, const std::vector<CauchyRow>& rows) {
  auto os = open_out(path);
  os << "eps_hi,eps_lo,d_theta,d_theta_s,d_u,total\n";
  for (const auto& r : rows) {
    os << fmt_double(r.eps_hi) << ',' << fmt_double(r.eps_lo) << ',' << fmt_double(r.d_theta)
       << ',' << fmt_double(r.d_theta_s) << ',' << fmt_double(r.d_u) << ','
       << fmt_double(r.total) << '\n';
  }
}

void write_bulk_snapshot(const std::string& path, const Simulator& sim, const State& s) {
  auto os = open_out(path);
  os << "node,x,y,theta,u_x,u_y\n";
  const auto& mesh = sim.mesh();
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    os << i << ',' << fmt_double(mesh.nodes[i].x()) << ',' << fmt_double(mesh.nodes[i].y()) << ','
       << fmt_double(s.theta[i]) << ',' << fmt_double(s.u[2 * i]) << ','
       << fmt_double(s.u[2 * i + 1]) << '\n';
  }
}

void write_surface_snapshot(const std::string& path, const Simulator& sim, const State& s) {
  auto os = open_out(path);
  os << "x,theta_s,chi,u_N,udot_T,z,R_mag\n";
  const auto& f = sim.forms();
  const auto& mesh = sim.mesh();
  const double dt = s.dt_last > 0.0 ? s.dt_last : 1.0;
  const Vec uN = f.normal_trace(s.u);
  const Vec udotT = f.tangential_trace(Vec(s.u - s.u_prev)) / dt;
  const Vec R = eval_R_magnitude(s.hist);
  for (int k = 0; k < f.num_surface; ++k) {
    os << fmt_double(mesh.nodes[f.surface_nodes[k]].x()) << ',' << fmt_double(s.theta_s[k]) << ','
       << fmt_double(s.chi[k]) << ',' << fmt_double(uN[k]) << ',' << fmt_double(udotT[k]) << ','
       << fmt_double(s.z[k]) << ',' << fmt_double(R[k]) << '\n';
  }
}

}  // namespace tac
