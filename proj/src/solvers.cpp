#include "tac/solvers.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tac {

namespace {

SpMat restrict_matrix(const SpMat& full, const std::vector<int>& dof_to_free, int nf) {
  std::vector<Triplet> trips;
  trips.reserve(full.nonZeros());
  for (int k = 0; k < full.outerSize(); ++k) {
    for (SpMat::InnerIterator it(full, k); it; ++it) {
      const int I = dof_to_free[it.row()], J = dof_to_free[it.col()];
      if (I >= 0 && J >= 0) trips.emplace_back(I, J, it.value());
    }
  }
  SpMat red(nf, nf);
  red.setFromTriplets(trips.begin(), trips.end());
  return red;
}

double rel_update(const Vec& next, const Vec& prev) {
  return (next - prev).norm() / (1.0 + prev.norm());
}

}  // namespace

Simulator::Simulator(Mesh mesh, MaterialModel material, RegularizationParams reg, SolverTols tols)
    : mesh_(std::move(mesh)), mat_(std::move(material)), reg_(reg), tols_(tols) {
  reg_.validate();
  forms_ = assemble(mesh_, mat_);
  kernel_ = build_kernel(mesh_, forms_, mat_.kernel_rho);
  const int nf = static_cast<int>(forms_.free_dof.size());
  B_red_ = restrict_matrix(forms_.b_form, forms_.dof_to_free, nf);
  A_red_ = restrict_matrix(forms_.a_form, forms_.dof_to_free, nf);
}

State Simulator::initial_state(const Scenario& s) const {
  const InitialFields f0 = interpolate_initial_data(s, mesh_, forms_);
  State st;
  st.t = 0.0;
  st.theta = f0.theta;
  st.theta_s = f0.theta_s;
  st.u = f0.u;
  st.u_prev = f0.u;
  st.chi = f0.chi;
  const Vec uN = forms_.normal_trace(st.u);
  st.eta_n = Vec(forms_.num_surface);
  st.xi = Vec(forms_.num_surface);
  for (int k = 0; k < forms_.num_surface; ++k) {
    st.eta_n[k] = phi_eps_prime(uN[k], reg_);
    st.xi[k] = beta_eps(st.chi[k], reg_);
  }
  st.z = Vec::Zero(forms_.num_surface);
  st.mu = Vec::Zero(forms_.num_surface);
  st.hist = HistoryAccumulator::zero(forms_.num_surface);
  return st;
}

Vec Simulator::h_nodal(double t, const Scenario& s) const {
  Vec h(forms_.num_nodes);
  for (int i = 0; i < forms_.num_nodes; ++i) h[i] = s.h(t, mesh_.nodes[i]);
  return h;
}

Vec Simulator::F_load(double t, const Scenario& s) const {
  Vec F = Vec::Zero(2 * forms_.num_nodes);
  for (int i = 0; i < forms_.num_nodes; ++i) {
    const Vec2 fi = s.f(t, mesh_.nodes[i]);
    F[2 * i] += forms_.m_lump[i] * fi.x();
    F[2 * i + 1] += forms_.m_lump[i] * fi.y();
    if (forms_.gamma2_lump[i] > 0.0) {
      const Vec2 gi = s.g(t, mesh_.nodes[i]);
      F[2 * i] += forms_.gamma2_lump[i] * gi.x();
      F[2 * i + 1] += forms_.gamma2_lump[i] * gi.y();
    }
  }
  return F;
}

double Simulator::momentum_scale(double t_new, const Scenario& scen) const {
  return 1.0 + forms_.restrict_free(F_load(t_new, scen)).norm();
}

Vec Simulator::boundary_source(const Vec& theta_surf_trace, const Vec& theta_s, const Vec& chi,
                               const Vec& R_mag, const Vec& udotT) const {
  Vec F(forms_.num_surface);
  for (int k = 0; k < forms_.num_surface; ++k) {
    const double gap = theta_surf_trace[k] - theta_s[k];
    F[k] = mat_.heat_exchange(chi[k]) * gap +
           mat_.fric_coeff_deriv(gap) * R_mag[k] * std::abs(udotT[k]);
  }
  return F;
}

Vec Simulator::momentum_residual(const Vec& u, const Vec& u_prev, const Vec& theta,
                                 const Vec& theta_s, const Vec& chi, const Vec& z,
                                 const Vec& R_mag, double dt, double t_new,
                                 const Scenario& scen) const {
  Vec res = forms_.b_form * ((u - u_prev) / dt) + forms_.a_form * u +
            forms_.D.transpose() * theta - F_load(t_new, scen);
  const Vec th_tr = forms_.surface_trace(theta);
  const Vec uN = forms_.normal_trace(u);
  for (int k = 0; k < forms_.num_surface; ++k) {
    const int i = forms_.surface_nodes[k];
    const double ms = forms_.ms_lump[k];
    // adhesive spring on the full trace vector
    res[2 * i] += ms * chi[k] * u[2 * i];
    res[2 * i + 1] += ms * chi[k] * u[2 * i + 1];
    // normal-compliance penalty, purely normal
    const double pen = ms * phi_eps_prime(uN[k], reg_);
    res[2 * i] += pen * forms_.normal.x();
    res[2 * i + 1] += pen * forms_.normal.y();
    // nonlocal Coulomb traction, purely tangential
    const double fr = ms * mat_.fric_coeff(th_tr[k] - theta_s[k]) * R_mag[k] * z[k];
    res[2 * i] += fr * forms_.tangent.x();
    res[2 * i + 1] += fr * forms_.tangent.y();
  }
  return forms_.restrict_free(res);
}

Vec Simulator::projection_residual(const Vec& z, const Vec& u, const Vec& u_prev,
                                   double dt) const {
  const Vec udotT = (forms_.tangential_trace(u) - forms_.tangential_trace(u_prev)) / dt;
  Vec r(forms_.num_surface);
  for (int k = 0; k < forms_.num_surface; ++k) {
    const double rk = forms_.ms_lump[k] / dt;
    r[k] = z[k] - std::clamp(z[k] + rk * udotT[k], -1.0, 1.0);
  }
  return r;
}

Vec Simulator::adhesion_residual(const Vec& chi, const Vec& chi_old, const Vec& theta_s,
                                 const Vec& u, double dt) const {
  Vec res = forms_.A_surf * chi;
  for (int k = 0; k < forms_.num_surface; ++k) {
    const int i = forms_.surface_nodes[k];
    const double usq = u[2 * i] * u[2 * i] + u[2 * i + 1] * u[2 * i + 1];
    res[k] += forms_.ms_lump[k] *
              ((chi[k] - chi_old[k]) / dt + beta_eps(chi[k], reg_) + mat_.cohesion_deriv(chi[k]) +
               mat_.latent_deriv(chi[k]) * theta_s[k] + 0.5 * usq);
  }
  return res;
}

Vec Simulator::theta_bulk_residual(const Vec& theta, const Vec& theta_old, const Vec& theta_s,
                                   const Vec& u, const Vec& u_prev, const Vec& chi_new,
                                   const Vec& R_mag, double dt, double t_new,
                                   const Scenario& scen) const {
  const Vec udot = (u - u_prev) / dt;
  Vec res = forms_.K_bulk * theta - forms_.D * udot;
  const Vec h = h_nodal(t_new, scen);
  for (int i = 0; i < forms_.num_nodes; ++i) {
    res[i] += forms_.m_lump[i] *
              ((L_eps(theta[i], reg_) - L_eps(theta_old[i], reg_)) / dt - h[i]);
  }
  const Vec F = boundary_source(forms_.surface_trace(theta), theta_s, chi_new, R_mag,
                                forms_.tangential_trace(udot));
  for (int k = 0; k < forms_.num_surface; ++k)
    res[forms_.surface_nodes[k]] += forms_.ms_lump[k] * F[k];
  return res;
}

Vec Simulator::theta_surf_residual(const Vec& theta_s, const Vec& theta_s_old, const Vec& theta,
                                   const Vec& u, const Vec& u_prev, const Vec& chi_new,
                                   const Vec& chi_old, const Vec& R_mag, double dt) const {
  Vec res = forms_.A_surf * theta_s;
  const Vec udot = (u - u_prev) / dt;
  const Vec F = boundary_source(forms_.surface_trace(theta), theta_s, chi_new, R_mag,
                                forms_.tangential_trace(udot));
  for (int k = 0; k < forms_.num_surface; ++k) {
    res[k] += forms_.ms_lump[k] *
              ((L_eps(theta_s[k], reg_) - L_eps(theta_s_old[k], reg_)) / dt -
               (mat_.latent(chi_new[k]) - mat_.latent(chi_old[k])) / dt - F[k]);
  }
  return res;
}

Simulator::MomentumResult Simulator::momentum_step(const Vec& u_prev, const Vec& theta_hat,
                                                   const Vec& theta_s_hat, const Vec& chi_hat,
                                                   const Vec& R_mag, const Vec& z_init, double dt,
                                                   double t_new, const Scenario& scen) const {
  MomentumResult out;
  const int nf = static_cast<int>(forms_.free_dof.size());
  const int ns = forms_.num_surface;
  const Vec th_tr = forms_.surface_trace(theta_hat);

  // z-independent part of the system and the friction force map z -> G z
  Vec G(ns);
  for (int k = 0; k < ns; ++k)
    G[k] = forms_.ms_lump[k] * mat_.fric_coeff(th_tr[k] - theta_s_hat[k]) * R_mag[k];

  const Vec rhs_red = forms_.restrict_free(forms_.b_form * (u_prev / dt) + F_load(t_new, scen) -
                                           forms_.D.transpose() * theta_hat);
  const double scale = 1.0 + rhs_red.norm();

  SpMat S0 = B_red_ / dt + A_red_;
  {
    std::vector<Triplet> trips;
    for (int k = 0; k < ns; ++k) {
      const int i = forms_.surface_nodes[k];
      for (int c = 0; c < 2; ++c) {
        const int fd = forms_.dof_to_free[2 * i + c];
        if (fd >= 0) trips.emplace_back(fd, fd, forms_.ms_lump[k] * chi_hat[k]);
      }
    }
    SpMat adh(nf, nf);
    adh.setFromTriplets(trips.begin(), trips.end());
    S0 += adh;
  }

  Vec u = u_prev;
  Vec z = z_init.cwiseMax(-1.0).cwiseMin(1.0);

  auto mom_res = [&](const Vec& uu, const Vec& zz) {
    return momentum_residual(uu, u_prev, theta_hat, theta_s_hat, chi_hat, zz, R_mag, dt, t_new,
                             scen);
  };

  // Inner u-solve at frozen z: active-set (semismooth Newton) on the normal
  // penalty; the problem is piecewise linear, so each active set needs one solve.
  const double mom_stop = 0.01 * tols_.mom;
  // The Jacobian depends only on the penalty active set (z enters the rhs),
  // so the factorization is cached by active-set signature.
  Eigen::SimplicialLDLT<SpMat> ldlt;
  std::vector<char> factored_set;
  auto factor_for = [&](const std::vector<char>& active) -> bool {
    if (active == factored_set) return true;
    SpMat J = S0;
    std::vector<Triplet> trips;
    for (int k = 0; k < ns; ++k) {
      if (!active[k]) continue;
      const int i = forms_.surface_nodes[k];
      const double w = forms_.ms_lump[k] / reg_.eps;
      const double nx = forms_.normal.x(), ny = forms_.normal.y();
      const int fx = forms_.dof_to_free[2 * i], fy = forms_.dof_to_free[2 * i + 1];
      if (fx >= 0) trips.emplace_back(fx, fx, w * nx * nx);
      if (fx >= 0 && fy >= 0) {
        trips.emplace_back(fx, fy, w * nx * ny);
        trips.emplace_back(fy, fx, w * nx * ny);
      }
      if (fy >= 0) trips.emplace_back(fy, fy, w * ny * ny);
    }
    SpMat pen(nf, nf);
    pen.setFromTriplets(trips.begin(), trips.end());
    J += pen;
    ldlt.compute(J);
    if (ldlt.info() != Eigen::Success) return false;
    factored_set = active;
    return true;
  };

  // force_solve: refresh u by at least one solve even when the residual is
  // already small, so the z loop always sees the exact affine response
  auto solve_u = [&](const Vec& zz, bool force_solve) -> bool {
    for (int it = 0; it < tols_.max_newton; ++it) {
      const Vec res = mom_res(u, zz);
      out.res = res.norm() / scale;
      ++out.newton_iters;
      if ((it > 0 || !force_solve) && res.norm() <= mom_stop * scale) return true;
      const Vec uN = forms_.normal_trace(u);
      std::vector<char> active(ns);
      for (int k = 0; k < ns; ++k) active[k] = uN[k] > 0.0 ? 1 : 0;
      if (!factor_for(active)) return false;
      const Vec du = ldlt.solve(-res);
      u += forms_.extend_free(du);
    }
    return out.res <= mom_stop;
  };

  if (!solve_u(z, false)) return out;

  auto udotT_of = [&](const Vec& uu) {
    return Vec((forms_.tangential_trace(uu) - forms_.tangential_trace(u_prev)) / dt);
  };

  // Alternate with the projection update z <- P_[-1,1](z + r du_T/dt),
  // r = lumped surface mass / dt, accelerated per node by a secant step on
  // the stick root du_T/dt = 0. r is halved on stall (too-large r safeguard).
  Vec udotT = udotT_of(u);
  Vec z_prev = z, udot_prev = udotT;
  bool have_prev = false;
  double r_fac = 1.0;
  double best_res = std::numeric_limits<double>::max();
  int stall = 0;
  for (int it = 0; it < tols_.max_proj; ++it) {
    ++out.proj_iters;
    double proj_res = 0.0;
    for (int k = 0; k < ns; ++k) {
      const double rk = forms_.ms_lump[k] / dt;
      proj_res = std::max(proj_res, std::abs(z[k] - std::clamp(z[k] + rk * udotT[k], -1.0, 1.0)));
    }
    out.proj_res = proj_res;
    if (proj_res <= 0.5 * tols_.proj && out.res <= mom_stop) {
      out.ok = true;
      break;
    }
    if (proj_res < 0.9 * best_res) {
      best_res = proj_res;
      stall = 0;
    } else if (++stall > 25) {
      r_fac = std::max(r_fac * 0.5, 1.0 / 64.0);
      stall = 0;
    }

    Vec z_next(ns);
    for (int k = 0; k < ns; ++k) {
      const double rk = r_fac * forms_.ms_lump[k] / dt;
      const double r_spec = forms_.ms_lump[k] / dt;
      double cand = std::clamp(z[k] + rk * udotT[k], -1.0, 1.0);
      bool accelerated = false;
      if (have_prev) {
        const double dz = z[k] - z_prev[k];
        const double dud = udotT[k] - udot_prev[k];
        if (std::abs(dz) > 1e-14 && std::abs(dud) > 1e-14 * (1.0 + std::abs(udotT[k]))) {
          const double secant = z[k] - udotT[k] * dz / dud;
          if (std::abs(secant - z[k]) < 4.0) {
            cand = std::clamp(secant, -1.0, 1.0);
            accelerated = true;
          }
        }
      }
      // No force feedback (threshold ~ 0) means du_T/dt ignores z: the fixed
      // point is the rail, jump there instead of creeping at rate r*du_T.
      if (!accelerated && G[k] <= 1e-14 * (1.0 + scale) &&
          std::abs(r_spec * udotT[k]) > tols_.proj) {
        cand = udotT[k] > 0.0 ? 1.0 : -1.0;
      }
      z_next[k] = cand;
    }
    z_prev = z;
    udot_prev = udotT;
    have_prev = true;
    z = z_next;
    if (!solve_u(z, true)) return out;
    udotT = udotT_of(u);
  }

  if (!out.ok) return out;

  out.u = u;
  out.z = z;
  const Vec uN = forms_.normal_trace(u);
  out.eta_n = Vec(ns);
  for (int k = 0; k < ns; ++k) out.eta_n[k] = phi_eps_prime(uN[k], reg_);
  return out;
}

Simulator::AdhesionResult Simulator::adhesion_step(const Vec& chi_old, const Vec& theta_s_hat,
                                                   const Vec& u_new, double dt) const {
  AdhesionResult out;
  const int ns = forms_.num_surface;
  Vec chi = chi_old;

  double forcing = 0.0;
  for (int k = 0; k < ns; ++k) {
    const int i = forms_.surface_nodes[k];
    const double usq = u_new[2 * i] * u_new[2 * i] + u_new[2 * i + 1] * u_new[2 * i + 1];
    forcing += std::pow(forms_.ms_lump[k] * (std::abs(mat_.latent_deriv(chi_old[k]) *
                                                      theta_s_hat[k]) +
                                             std::abs(mat_.cohesion_deriv(chi_old[k])) + 0.5 * usq),
                        2);
  }
  const double scale = 1.0 + std::sqrt(forcing);

  auto second_deriv = [&](const std::function<double(double)>& d, double x) {
    const double h = 1e-6;
    return (d(x + h) - d(x - h)) / (2.0 * h);
  };

  double res_norm = 0.0;
  for (int it = 0; it < tols_.max_newton; ++it) {
    Vec res = adhesion_residual(chi, chi_old, theta_s_hat, u_new, dt);
    res_norm = res.norm();
    out.res = res_norm / scale;
    ++out.newton_iters;
    if (res_norm <= 0.01 * tols_.chi * scale) {
      out.ok = true;
      break;
    }
    Mat J = forms_.A_surf;
    for (int k = 0; k < ns; ++k) {
      J(k, k) += forms_.ms_lump[k] *
                 (1.0 / dt + beta_eps_prime(chi[k], reg_) +
                  second_deriv(mat_.cohesion_deriv, chi[k]) +
                  second_deriv(mat_.latent_deriv, chi[k]) * theta_s_hat[k]);
    }
    const Vec dchi = J.ldlt().solve(-res);
    // backtracking line search; divergence here signals a too-large dt
    double alpha = 1.0;
    bool progressed = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Vec trial = chi + alpha * dchi;
      if (adhesion_residual(trial, chi_old, theta_s_hat, u_new, dt).norm() <
          (1.0 - 1e-4 * alpha) * res_norm) {
        chi = trial;
        progressed = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!progressed) return out;
  }
  if (!out.ok) return out;

  out.chi = chi;
  out.xi = Vec(ns);
  for (int k = 0; k < ns; ++k) out.xi[k] = beta_eps(chi[k], reg_);
  return out;
}

Simulator::ThermalResult Simulator::thermal_step(const Vec& theta_old, const Vec& theta_s_old,
                                                 const Vec& theta_hat, const Vec& theta_s_hat,
                                                 const Vec& u_new, const Vec& u_prev,
                                                 const Vec& chi_old, const Vec& chi_new,
                                                 const Vec& R_mag, double dt, double t_new,
                                                 const Scenario& scen) const {
  ThermalResult out;
  const int nn = forms_.num_nodes;
  const int ns = forms_.num_surface;
  const Vec udot = (u_new - u_prev) / dt;
  const Vec udotT = forms_.tangential_trace(udot);

  // frozen boundary source from the hatted temperatures and the new u, chi
  const Vec Fhat =
      boundary_source(forms_.surface_trace(theta_hat), theta_s_hat, chi_new, R_mag, udotT);
  const Vec h = h_nodal(t_new, scen);

  // ---- bulk equation ----
  {
    Vec fixed = -(forms_.D * udot);
    for (int i = 0; i < nn; ++i) fixed[i] -= forms_.m_lump[i] * h[i];
    for (int k = 0; k < ns; ++k) fixed[forms_.surface_nodes[k]] += forms_.ms_lump[k] * Fhat[k];
    const double scale = 1.0 + fixed.norm();

    auto residual = [&](const Vec& th) {
      Vec res = forms_.K_bulk * th + fixed;
      for (int i = 0; i < nn; ++i)
        res[i] += forms_.m_lump[i] * (L_eps(th[i], reg_) - L_eps(theta_old[i], reg_)) / dt;
      return res;
    };

    Vec th = theta_old;
    bool done = false;
    for (int it = 0; it < tols_.max_newton; ++it) {
      const Vec res = residual(th);
      out.res_bulk = res.norm() / scale;
      ++out.newton_iters;
      if (res.norm() <= 0.01 * tols_.theta * scale) {
        done = true;
        break;
      }
      std::vector<Triplet> trips;
      for (int i = 0; i < nn; ++i)
        trips.emplace_back(i, i, forms_.m_lump[i] * L_eps_prime(th[i], reg_) / dt);
      SpMat J(nn, nn);
      J.setFromTriplets(trips.begin(), trips.end());
      J += forms_.K_bulk;
      Eigen::SimplicialLDLT<SpMat> ldlt(J);
      if (ldlt.info() != Eigen::Success) return out;
      const Vec dth = ldlt.solve(-res);
      double alpha = 1.0;
      bool progressed = false;
      const double rn = res.norm();
      for (int ls = 0; ls < 30; ++ls) {
        const Vec trial = th + alpha * dth;
        if (residual(trial).norm() < (1.0 - 1e-4 * alpha) * rn) {
          th = trial;
          progressed = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!progressed) return out;
    }
    if (!done) return out;
    out.theta = th;
  }

  // ---- surface equation (independent of the bulk solve) ----
  {
    Vec fixed(ns);
    for (int k = 0; k < ns; ++k) {
      fixed[k] = forms_.ms_lump[k] *
                 (-(mat_.latent(chi_new[k]) - mat_.latent(chi_old[k])) / dt - Fhat[k]);
    }
    const double scale = 1.0 + fixed.norm();

    auto residual = [&](const Vec& ths) {
      Vec res = forms_.A_surf * ths + fixed;
      for (int k = 0; k < ns; ++k)
        res[k] += forms_.ms_lump[k] * (L_eps(ths[k], reg_) - L_eps(theta_s_old[k], reg_)) / dt;
      return res;
    };

    Vec ths = theta_s_old;
    bool done = false;
    for (int it = 0; it < tols_.max_newton; ++it) {
      const Vec res = residual(ths);
      out.res_surf = res.norm() / scale;
      ++out.newton_iters;
      if (res.norm() <= 0.01 * tols_.theta * scale) {
        done = true;
        break;
      }
      Mat J = forms_.A_surf;
      for (int k = 0; k < ns; ++k)
        J(k, k) += forms_.ms_lump[k] * L_eps_prime(ths[k], reg_) / dt;
      const Vec dths = J.ldlt().solve(-res);
      double alpha = 1.0;
      bool progressed = false;
      const double rn = res.norm();
      for (int ls = 0; ls < 30; ++ls) {
        const Vec trial = ths + alpha * dths;
        if (residual(trial).norm() < (1.0 - 1e-4 * alpha) * rn) {
          ths = trial;
          progressed = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!progressed) return out;
    }
    if (!done) return out;
    out.theta_s = ths;
  }

  out.ok = true;
  return out;
}

Simulator::StepResult Simulator::coupled_step(const State& s, double dt,
                                              const Scenario& scen) const {
  StepResult out;
  const double t_new = s.t + dt;
  const double w = tols_.omega;

  Vec th_hat = s.theta, ths_hat = s.theta_s, u_hat = s.u, chi_hat = s.chi;
  Vec z_it = s.z, eta_it = s.eta_n;
  Vec xi_final, R_final;

  StepReport rep;
  bool converged = false;

  for (int outer = 0; outer < tols_.max_outer; ++outer) {
    ++rep.outer_iters;
    const Vec R_hat = eval_R_magnitude(s.hist, kernel_, eta_it, dt);

    auto mom = momentum_step(s.u, th_hat, ths_hat, chi_hat, R_hat, z_it, dt, t_new, scen);
    rep.momentum_newton_iters += mom.newton_iters;
    rep.momentum_proj_iters += mom.proj_iters;
    if (!mom.ok) {
      out.message = "momentum sub-solver did not converge";
      out.report = rep;
      return out;
    }

    auto adh = adhesion_step(s.chi, ths_hat, mom.u, dt);
    rep.adhesion_newton_iters += adh.newton_iters;
    if (!adh.ok) {
      out.message = "adhesion Newton did not converge";
      out.report = rep;
      return out;
    }

    const Vec R_new = eval_R_magnitude(s.hist, kernel_, mom.eta_n, dt);
    auto th = thermal_step(s.theta, s.theta_s, th_hat, ths_hat, mom.u, s.u, s.chi, adh.chi, R_new,
                           dt, t_new, scen);
    rep.thermal_newton_iters += th.newton_iters;
    if (!th.ok) {
      out.message = "temperature Newton did not converge";
      out.report = rep;
      return out;
    }

    const double update =
        std::max({rel_update(th.theta, th_hat), rel_update(th.theta_s, ths_hat),
                  rel_update(mom.u, u_hat), rel_update(adh.chi, chi_hat)});
    rep.outer_update = update;

    th_hat += w * (th.theta - th_hat);
    ths_hat += w * (th.theta_s - ths_hat);
    u_hat += w * (mom.u - u_hat);
    chi_hat += w * (adh.chi - chi_hat);
    z_it = mom.z;
    eta_it = mom.eta_n;
    xi_final = adh.xi;
    R_final = R_new;

    if (update <= tols_.outer) {
      // A true fixed point: every sub-residual must hold at the SAME iterate,
      // nothing frozen. Scales are the forcing magnitudes seen from the old
      // state, so tolerances stay load-scaled absolute.
      const double sc_m = 1.0 + forms_.restrict_free(forms_.b_form * (s.u / dt) +
                                                     F_load(t_new, scen) -
                                                     forms_.D.transpose() * th_hat)
                                    .norm();
      const double sc_a =
          1.0 + adhesion_residual(s.chi, s.chi, ths_hat, u_hat, dt).norm();
      const double sc_tb = 1.0 + theta_bulk_residual(s.theta, s.theta, ths_hat, u_hat, s.u,
                                                     chi_hat, R_final, dt, t_new, scen)
                                     .norm();
      const double sc_ts = 1.0 + theta_surf_residual(s.theta_s, s.theta_s, th_hat, u_hat, s.u,
                                                     chi_hat, s.chi, R_final, dt)
                                     .norm();
      rep.res_momentum = momentum_residual(u_hat, s.u, th_hat, ths_hat, chi_hat, z_it, R_final,
                                           dt, t_new, scen)
                             .norm() /
                         sc_m;
      rep.res_proj = projection_residual(z_it, u_hat, s.u, dt).cwiseAbs().maxCoeff();
      rep.res_adhesion = adhesion_residual(chi_hat, s.chi, ths_hat, u_hat, dt).norm() / sc_a;
      rep.res_theta_bulk = theta_bulk_residual(th_hat, s.theta, ths_hat, u_hat, s.u, chi_hat,
                                               R_final, dt, t_new, scen)
                               .norm() /
                           sc_tb;
      rep.res_theta_surf = theta_surf_residual(ths_hat, s.theta_s, th_hat, u_hat, s.u, chi_hat,
                                               s.chi, R_final, dt)
                               .norm() /
                           sc_ts;
      if (rep.res_momentum <= tols_.mom && rep.res_proj <= tols_.proj &&
          rep.res_adhesion <= tols_.chi && rep.res_theta_bulk <= tols_.theta &&
          rep.res_theta_surf <= tols_.theta) {
        converged = true;
        break;
      }
    }
  }

  if (!converged) {
    out.message = "outer fixed-point iteration did not converge";
    out.report = rep;
    return out;
  }

  State ns;
  ns.t = t_new;
  ns.dt_last = dt;
  ns.theta = th_hat;
  ns.theta_s = ths_hat;
  ns.u = u_hat;
  ns.u_prev = s.u;
  ns.chi = chi_hat;
  ns.eta_n = eta_it;
  ns.z = z_it;
  ns.xi = xi_final;
  ns.hist = s.hist;
  advance(ns.hist, kernel_, eta_it, dt);
  ns.mu = eval_R_magnitude(ns.hist).cwiseProduct(z_it);

  rep.min_theta = std::min(ns.theta.minCoeff(), ns.theta_s.minCoeff());
  rep.converged = true;
  out.state = std::move(ns);
  out.report = rep;
  out.ok = true;
  return out;
}

RunResult run_simulation(const Simulator& sim, const Scenario& scen) {
  RunResult out;
  out.trajectory.push_back(sim.initial_state(scen));

  const double dt = scen.dt;
  const int n_steps = static_cast<int>(std::llround(scen.T_final / dt));
  if (n_steps < 1 || std::abs(n_steps * dt - scen.T_final) > 1e-9 * std::max(1.0, scen.T_final)) {
    out.message = "time grid: T must be an integer multiple of dt";
    return out;
  }

  for (int step = 0; step < n_steps; ++step) {
    bool accepted = false;
    for (int halving = 0; halving <= sim.tols().max_halvings && !accepted; ++halving) {
      const int m = 1 << halving;
      const double sub_dt = dt / m;
      State work = out.trajectory.back();
      StepReport merged;
      merged.substeps = m;
      bool ok = true;
      for (int i = 0; i < m; ++i) {
        auto res = sim.coupled_step(work, sub_dt, scen);
        if (!res.ok) {
          ok = false;
          out.message = res.message;
          break;
        }
        work = std::move(res.state);
        merged.outer_iters += res.report.outer_iters;
        merged.momentum_newton_iters += res.report.momentum_newton_iters;
        merged.momentum_proj_iters += res.report.momentum_proj_iters;
        merged.adhesion_newton_iters += res.report.adhesion_newton_iters;
        merged.thermal_newton_iters += res.report.thermal_newton_iters;
        merged.res_momentum = res.report.res_momentum;
        merged.res_proj = res.report.res_proj;
        merged.res_adhesion = res.report.res_adhesion;
        merged.res_theta_bulk = res.report.res_theta_bulk;
        merged.res_theta_surf = res.report.res_theta_surf;
        merged.outer_update = res.report.outer_update;
        merged.min_theta = res.report.min_theta;
        merged.converged = true;
      }
      if (ok) {
        out.trajectory.push_back(std::move(work));
        out.reports.push_back(merged);
        accepted = true;
      }
    }
    if (!accepted) {
      out.message = "hard step failure at t = " + std::to_string((step + 1) * dt) +
                    (out.message.empty() ? "" : (": " + out.message));
      return out;
    }
  }
  out.completed = true;
  return out;
}

}  // namespace tac
