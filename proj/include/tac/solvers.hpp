#pragma once

#include <string>
#include <vector>

#include "tac/assembly.hpp"
#include "tac/material.hpp"
#include "tac/mesh.hpp"
#include "tac/nonlocal.hpp"
#include "tac/regularization.hpp"
#include "tac/scenario.hpp"
#include "tac/state.hpp"
#include "tac/types.hpp"

namespace tac {

struct SolverTols {
  double mom = 1e-10;    // momentum residual (absolute, load-scaled)
  double chi = 1e-10;    // adhesion Newton residual
  double theta = 1e-10;  // temperature Newton residuals
  double proj = 1e-10;   // friction projection fixed-point residual
  double outer = 1e-8;   // relative composite update of the Picard loop
  int max_outer = 100;
  int max_newton = 60;
  int max_proj = 5000;
  double omega = 1.0;     // Picard under-relaxation
  double slip_tol = 1e-6; // |du_T/dt| above which a node counts as slipping
  int max_halvings = 4;
};

/// One mesh + material + smoothing parameter bundle with the three
/// sub-solvers and the per-step staggered fixed point. A Simulator is
/// immutable after construction; one simulation owns one State at a time.
class Simulator {
 public:
  Simulator(Mesh mesh, MaterialModel material, RegularizationParams reg, SolverTols tols = {});

  const Mesh& mesh() const { return mesh_; }
  const AssembledForms& forms() const { return forms_; }
  const MaterialModel& material() const { return mat_; }
  const RegularizationParams& reg() const { return reg_; }
  const SolverTols& tols() const { return tols_; }
  const KernelMatrix& kernel() const { return kernel_; }

  State initial_state(const Scenario& s) const;

  // --- loads -------------------------------------------------------------
  Vec h_nodal(double t, const Scenario& s) const;  // bulk source values per node
  Vec F_load(double t, const Scenario& s) const;   // lumped body force + traction

  // --- sub-solvers ---------------------------------------------------------
  struct MomentumResult {
    Vec u, eta_n, z;
    int newton_iters = 0, proj_iters = 0;
    double res = 0.0, proj_res = 0.0;
    bool ok = false;
  };
  /// Implicit-Euler momentum solve with frozen temperatures, adhesion and
  /// friction threshold: alternates the u-solve (z frozen, normal penalty by
  /// semismooth Newton) with the projection update z <- P_[-1,1](z + r du_T/dt).
  MomentumResult momentum_step(const Vec& u_prev, const Vec& theta_hat, const Vec& theta_s_hat,
                               const Vec& chi_hat, const Vec& R_mag, const Vec& z_init, double dt,
                               double t_new, const Scenario& scen) const;

  struct AdhesionResult {
    Vec chi, xi;
    int newton_iters = 0;
    double res = 0.0;
    bool ok = false;
  };
  /// Implicit-Euler adhesion solve with frozen surface temperature and the
  /// new displacement trace; lumped surface mass, Newton per step.
  AdhesionResult adhesion_step(const Vec& chi_old, const Vec& theta_s_hat, const Vec& u_new,
                               double dt) const;

  struct ThermalResult {
    Vec theta, theta_s;
    int newton_iters = 0;
    double res_bulk = 0.0, res_surf = 0.0;
    bool ok = false;
  };
  /// Decoupled bulk/surface temperature solves with the frozen boundary
  /// source built from (theta_hat, theta_s_hat, new u, new chi, |R|).
  ThermalResult thermal_step(const Vec& theta_old, const Vec& theta_s_old, const Vec& theta_hat,
                             const Vec& theta_s_hat, const Vec& u_new, const Vec& u_prev,
                             const Vec& chi_old, const Vec& chi_new, const Vec& R_mag, double dt,
                             double t_new, const Scenario& scen) const;

  struct StepResult {
    State state;
    StepReport report;
    bool ok = false;
    std::string message;
  };
  /// One implicit-Euler step of the full system: Picard iteration of
  /// momentum -> adhesion -> temperatures with the newest iterates, accepted
  /// only when all sub-residuals hold simultaneously at the same iterate.
  /// Advances the history accumulator once with the converged eta.
  StepResult coupled_step(const State& s, double dt, const Scenario& scen) const;

  // --- residuals of the fully coupled discrete system ---------------------
  // Shared by the acceptance checks, the energy ledger and the monolithic
  // test oracle; all evaluated with the fields passed in (nothing frozen).
  Vec momentum_residual(const Vec& u, const Vec& u_prev, const Vec& theta, const Vec& theta_s,
                        const Vec& chi, const Vec& z, const Vec& R_mag, double dt, double t_new,
                        const Scenario& scen) const;  // reduced to free dofs
  Vec projection_residual(const Vec& z, const Vec& u, const Vec& u_prev, double dt) const;
  Vec adhesion_residual(const Vec& chi, const Vec& chi_old, const Vec& theta_s, const Vec& u,
                        double dt) const;
  Vec theta_bulk_residual(const Vec& theta, const Vec& theta_old, const Vec& theta_s,
                          const Vec& u, const Vec& u_prev, const Vec& chi_new,
                          const Vec& R_mag, double dt, double t_new, const Scenario& scen) const;
  Vec theta_surf_residual(const Vec& theta_s, const Vec& theta_s_old, const Vec& theta,
                          const Vec& u, const Vec& u_prev, const Vec& chi_new, const Vec& chi_old,
                          const Vec& R_mag, double dt) const;

  /// Boundary heat source k(chi)(th - th_s) + c'(th - th_s) |R| |du_T/dt|
  /// per surface node.
  Vec boundary_source(const Vec& theta_surf_trace, const Vec& theta_s, const Vec& chi,
                      const Vec& R_mag, const Vec& udotT) const;

  double momentum_scale(double t_new, const Scenario& scen) const;

 private:
  Mesh mesh_;
  MaterialModel mat_;
  RegularizationParams reg_;
  SolverTols tols_;
  AssembledForms forms_;
  KernelMatrix kernel_;
  SpMat S_visc_elast_;  // reduced b/dt-independent part: a-form on free dofs
  SpMat B_red_, A_red_;
};

struct RunResult {
  std::vector<State> trajectory;       // trajectory[0] = initial state
  std::vector<StepReport> reports;     // one per accepted grid step
  bool completed = false;
  std::string message;
};

/// Time loop on the uniform grid dt, T; on a failed step the grid interval is
/// re-integrated with 2^k equal substeps (k <= max_halvings) before giving up.
RunResult run_simulation(const Simulator& sim, const Scenario& scen);

}  // namespace tac
