#pragma once

// Dense high-accuracy solve of the full coupled implicit-Euler system on one
// grid step (test oracle; stays independent of the staggered solution path).
// Unknowns stacked as [theta, theta_s, u_free, chi, z]; residuals are the
// library's fully coupled evaluators plus the friction projection identity.

#include <cmath>
#include <stdexcept>

#include "tac/solvers.hpp"

namespace tac_test {

using tac::Scenario;
using tac::Simulator;
using tac::State;
using tac::Vec;

struct Monolithic {
  const Simulator& sim;
  const Scenario& scen;
  const State& s0;
  double dt;

  int nn, ns, nf;

  Monolithic(const Simulator& sim_, const Scenario& scen_, const State& s0_, double dt_)
      : sim(sim_), scen(scen_), s0(s0_), dt(dt_) {
    nn = sim.forms().num_nodes;
    ns = sim.forms().num_surface;
    nf = static_cast<int>(sim.forms().free_dof.size());
  }

  int size() const { return nn + ns + nf + ns + ns; }

  Vec pack(const State& s) const {
    Vec x(size());
    x.segment(0, nn) = s.theta;
    x.segment(nn, ns) = s.theta_s;
    x.segment(nn + ns, nf) = sim.forms().restrict_free(s.u);
    x.segment(nn + ns + nf, ns) = s.chi;
    x.segment(nn + ns + nf + ns, ns) = s.z;
    return x;
  }

  Vec residual(const Vec& x) const {
    const Vec th = x.segment(0, nn);
    const Vec ths = x.segment(nn, ns);
    const Vec u = sim.forms().extend_free(x.segment(nn + ns, nf));
    const Vec chi = x.segment(nn + ns + nf, ns);
    const Vec z = x.segment(nn + ns + nf + ns, ns);

    const Vec uN = sim.forms().normal_trace(u);
    Vec eta(ns);
    for (int k = 0; k < ns; ++k) eta[k] = tac::phi_eps_prime(uN[k], sim.reg());
    const Vec R = tac::eval_R_magnitude(s0.hist, sim.kernel(), eta, dt);

    const double t_new = s0.t + dt;
    Vec r(size());
    r.segment(0, nn) =
        sim.theta_bulk_residual(th, s0.theta, ths, u, s0.u, chi, R, dt, t_new, scen);
    r.segment(nn, ns) =
        sim.theta_surf_residual(ths, s0.theta_s, th, u, s0.u, chi, s0.chi, R, dt);
    r.segment(nn + ns, nf) =
        sim.momentum_residual(u, s0.u, th, ths, chi, z, R, dt, t_new, scen);
    r.segment(nn + ns + nf, ns) = sim.adhesion_residual(chi, s0.chi, ths, u, dt);
    r.segment(nn + ns + nf + ns, ns) = sim.projection_residual(z, u, s0.u, dt);
    return r;
  }

  // damped Newton with a forward-difference Jacobian
  State solve(double tol = 1e-13, int max_it = 80) const {
    Vec x = pack(s0);
    double rn = residual(x).norm();
    for (int it = 0; it < max_it; ++it) {
      const Vec r = residual(x);
      rn = r.norm();
      if (rn <= tol) break;
      tac::Mat J(size(), size());
      for (int j = 0; j < size(); ++j) {
        const double h = 1e-7 * (1.0 + std::abs(x[j]));
        Vec xp = x;
        xp[j] += h;
        J.col(j) = (residual(xp) - r) / h;
      }
      const Vec dx = J.fullPivLu().solve(-r);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls) {
        const Vec trial = x + alpha * dx;
        if (residual(trial).norm() < (1.0 - 1e-4 * alpha) * rn) {
          x = trial;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) throw std::runtime_error("monolithic oracle: Newton stalled");
    }
    if (residual(x).norm() > tol)
      throw std::runtime_error("monolithic oracle: tolerance not reached");

    State s = s0;
    s.t = s0.t + dt;
    s.dt_last = dt;
    s.theta = x.segment(0, nn);
    s.theta_s = x.segment(nn, ns);
    s.u = sim.forms().extend_free(x.segment(nn + ns, nf));
    s.u_prev = s0.u;
    s.chi = x.segment(nn + ns + nf, ns);
    s.z = x.segment(nn + ns + nf + ns, ns);
    const Vec uN = sim.forms().normal_trace(s.u);
    s.eta_n.resize(ns);
    s.xi.resize(ns);
    for (int k = 0; k < ns; ++k) {
      s.eta_n[k] = tac::phi_eps_prime(uN[k], sim.reg());
      s.xi[k] = tac::beta_eps(s.chi[k], sim.reg());
    }
    s.hist = s0.hist;
    tac::advance(s.hist, sim.kernel(), s.eta_n, dt);
    s.mu = tac::eval_R_magnitude(s.hist).cwiseProduct(s.z);
    return s;
  }
};

}  // namespace tac_test
