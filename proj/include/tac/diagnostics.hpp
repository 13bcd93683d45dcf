#pragma once

#include <string>
#include <vector>

#include "tac/solvers.hpp"
#include "tac/state.hpp"
#include "tac/types.hpp"

namespace tac {

/// One row of the discrete energy ledger. State terms are evaluated at the
/// row's time level; increment and data terms cover the step ending there.
/// Every form is evaluated exactly as the solver discretizes it, so the
/// cumulative inequality closes to solver tolerance.
struct LedgerRow {
  double t = 0.0;
  // energies at t
  double Ieps_bulk = 0.0, Ieps_surf = 0.0;
  double elastic = 0.0, adhesive = 0.0, penalty = 0.0;
  double grad_chi_energy = 0.0, beta_envelope = 0.0;
  // dissipation / coupling increments over the step
  double visc = 0.0, grad_theta = 0.0, grad_theta_s = 0.0;
  double heat_exchange = 0.0, frictional_heating = 0.0, friction_work = 0.0;
  double chi_rate = 0.0, a_incr_diss = 0.0, achi_incr_diss = 0.0;
  double adhesive_coupling = 0.0;
  // data terms
  double work_F = 0.0, work_h = 0.0;
  double lambda_release = 0.0, lambda_absorb = 0.0, cohesion_work = 0.0;
};

std::vector<std::string> ledger_column_names();
std::vector<double> ledger_row_values(const LedgerRow& r);

/// Ledger rows for a full trajectory (row 0 carries the initial energies and
/// zero increments).
std::vector<LedgerRow> compute_ledger(const Simulator& sim, const Scenario& scen,
                                      const std::vector<State>& traj);

struct EnergyCheck {
  bool pass = true;
  double worst_term_value = 0.0;  // most negative theory-nonnegative entry
  std::string worst_term;
  int worst_term_step = -1;
  double worst_cum_margin = 0.0;  // min over steps of RHS + slack - LHS
  int first_failed_step = -1;
  double data_scale = 0.0;
};

/// The discrete energy inequality: every theory-nonnegative term >= -slack
/// and cumulative LHS <= RHS + slack at every step, slack = slack_rel * data
/// scale. Mandatory check.
EnergyCheck energy_check(const std::vector<LedgerRow>& rows, double slack_rel = 1e-8);

struct DissipationFields {
  Vec bulk;     // per element: eps(du/dt):K_v:eps(du/dt) + |grad theta|^2
  Vec surface;  // per segment: heat exchange + frictional heating + |d chi/dt|^2 + |grad theta_s|^2
  double min_bulk = 0.0, min_surface = 0.0;
};
DissipationFields dissipation_density(const Simulator& sim, const State& prev, const State& next);

struct SignoriniResidual {
  double r1 = 0.0;  // ||max(u_N,0)||           (penetration)
  double r2 = 0.0;  // ||max(sigma_N + chi u_N, 0)||   (identically 0 under penalty)
  double r3 = 0.0;  // ||u_N (sigma_N + chi u_N)||     (complementarity defect)
  Vec penetration, pressure_violation, complementarity;  // nodewise
};
SignoriniResidual signorini_residual(const Simulator& sim, const State& s);

struct CoulombResidual {
  enum class Phase { Stick, Slip };
  std::vector<Phase> phase;     // per surface node, by |du_T/dt| > slip_tol
  Vec violation;                // per node: bound violation magnitude
  double max_abs_z = 0.0;       // should be <= 1
  double min_slip_abs_z = 1.0;  // min |z| over slip nodes (1 when none)
  double min_mu_udot = 0.0;     // min of mu * du_T/dt (>= 0 in theory)
};
CoulombResidual coulomb_residual(const Simulator& sim, const State& s);

/// Discrete stand-ins for the uniform-in-eps estimate families; finite values
/// monitored across runs (never aborts anything).
struct EstimateMonitors {
  double sqrt_eps_theta_LinfH = 0.0;
  double theta_L2V = 0.0;
  double theta_LinfL1 = 0.0;
  double thetas_L2V = 0.0;
  double thetas_LinfL1 = 0.0;
  double u_H1W = 0.0;
  double chi_LinfV = 0.0;
  double chi_H1H = 0.0;
  double eta_L2 = 0.0;       // penalty multiplier, L2 in time and space
  double mu_LinfL2 = 0.0;
  double mu_Linf_node = 0.0;
  double Leps_theta_LinfH = 0.0;
  double Leps_thetas_LinfH = 0.0;
  double bv_theta_dual = 0.0;   // sum_n || theta^{n+1}-theta^n ||_dual
  double bv_thetas_dual = 0.0;
  double theta_neg_L2L2 = 0.0;  // negative-part norm, positivity trend
};
EstimateMonitors estimate_monitors(const Simulator& sim, const std::vector<State>& traj);
std::vector<std::pair<std::string, double>> monitor_values(const EstimateMonitors& m);

/// Pairwise distances between trajectories of an eps sweep (same mesh/grid):
/// discrete L2(0,T;H) for theta, L2(0,T;H_GammaC) for theta_s, Linf(0,T;W)
/// for u.
struct CauchyRow {
  double eps_hi = 0.0, eps_lo = 0.0;
  double d_theta = 0.0, d_theta_s = 0.0, d_u = 0.0, total = 0.0;
};
std::vector<CauchyRow> eps_convergence_study(const Simulator& sim,
                                             const std::vector<double>& eps_values,
                                             const std::vector<std::vector<State>>& trajectories);

}  // namespace tac
