#pragma once

#include <string>

#include "tac/nonlocal.hpp"
#include "tac/types.hpp"

namespace tac {

/// All unknowns at one time level. Vector fields interleaved (x,y); surface
/// fields indexed like AssembledForms surface fields. Invariants at accepted
/// steps: z in [-1,1], eta_n >= 0, xi = beta_eps(chi), mu = |R| z nodewise.
struct State {
  double t = 0.0;
  double dt_last = 0.0;  // size of the step that produced this state (0 initially)
  Vec theta;    // bulk absolute temperature
  Vec theta_s;  // surface absolute temperature
  Vec u;        // displacement
  Vec u_prev;   // displacement at the previous accepted step
  Vec chi;      // adhesion parameter
  Vec eta_n;    // normal multiplier magnitude phi_eps'(u_N)
  Vec z;        // tangential multiplier
  Vec mu;       // friction traction |R| z
  Vec xi;       // selection beta_eps(chi)
  HistoryAccumulator hist;
};

/// Audit trail of one accepted grid step.
struct StepReport {
  int outer_iters = 0;
  int momentum_newton_iters = 0;
  int momentum_proj_iters = 0;
  int adhesion_newton_iters = 0;
  int thermal_newton_iters = 0;
  double res_momentum = 0.0;   // simultaneous residuals at the accepted iterate
  double res_proj = 0.0;
  double res_adhesion = 0.0;
  double res_theta_bulk = 0.0;
  double res_theta_surf = 0.0;
  double outer_update = 0.0;
  double min_theta = 0.0;
  int substeps = 1;
  bool converged = false;
};

}  // namespace tac
