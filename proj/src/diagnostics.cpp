#include "tac/diagnostics.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace tac {

namespace {

double lumped_Ieps(const Vec& m, const Vec& field, const RegularizationParams& reg) {
  double s = 0.0;
  for (int i = 0; i < field.size(); ++i) s += m[i] * I_eps(field[i], reg);
  return s;
}

}  // namespace

std::vector<std::string> ledger_column_names() {
  return {"t",
          "Ieps_bulk",
          "Ieps_surf",
          "elastic",
          "adhesive",
          "penalty",
          "grad_chi_energy",
          "beta_envelope",
          "visc",
          "grad_theta",
          "grad_theta_s",
          "heat_exchange",
          "frictional_heating",
          "friction_work",
          "chi_rate",
          "a_incr_diss",
          "achi_incr_diss",
          "adhesive_coupling",
          "work_F",
          "work_h",
          "lambda_release",
          "lambda_absorb",
          "cohesion_work"};
}

std::vector<double> ledger_row_values(const LedgerRow& r) {
  return {r.t,
          r.Ieps_bulk,
          r.Ieps_surf,
          r.elastic,
          r.adhesive,
          r.penalty,
          r.grad_chi_energy,
          r.beta_envelope,
          r.visc,
          r.grad_theta,
          r.grad_theta_s,
          r.heat_exchange,
          r.frictional_heating,
          r.friction_work,
          r.chi_rate,
          r.a_incr_diss,
          r.achi_incr_diss,
          r.adhesive_coupling,
          r.work_F,
          r.work_h,
          r.lambda_release,
          r.lambda_absorb,
          r.cohesion_work};
}

std::vector<LedgerRow> compute_ledger(const Simulator& sim, const Scenario& scen,
                                      const std::vector<State>& traj) {
  const auto& f = sim.forms();
  const auto& mat = sim.material();
  const auto& reg = sim.reg();
  std::vector<LedgerRow> rows;
  rows.reserve(traj.size());

  auto state_terms = [&](const State& s, LedgerRow& r) {
    r.t = s.t;
    r.Ieps_bulk = lumped_Ieps(f.m_lump, s.theta, reg);
    r.Ieps_surf = lumped_Ieps(f.ms_lump, s.theta_s, reg);
    r.elastic = 0.5 * s.u.dot(f.a_form * s.u);
    r.grad_chi_energy = 0.5 * s.chi.dot(f.A_surf * s.chi);
    const Vec uN = f.normal_trace(s.u);
    r.adhesive = r.penalty = r.beta_envelope = 0.0;
    for (int k = 0; k < f.num_surface; ++k) {
      const int i = f.surface_nodes[k];
      const double usq = s.u[2 * i] * s.u[2 * i] + s.u[2 * i + 1] * s.u[2 * i + 1];
      r.adhesive += 0.5 * f.ms_lump[k] * s.chi[k] * usq;
      r.penalty += f.ms_lump[k] * phi_eps(uN[k], reg);
      r.beta_envelope += f.ms_lump[k] * beta_env(s.chi[k], reg);
    }
  };

  LedgerRow first;
  state_terms(traj.front(), first);
  rows.push_back(first);

  for (size_t n = 1; n < traj.size(); ++n) {
    const State& a = traj[n - 1];
    const State& b = traj[n];
    const double dt = b.t - a.t;
    LedgerRow r;
    state_terms(b, r);

    const Vec du = b.u - a.u;
    const Vec dchi = b.chi - a.chi;
    const Vec th_tr = f.surface_trace(b.theta);
    const Vec duT = f.tangential_trace(du);
    const Vec R_mag = eval_R_magnitude(b.hist);
    const Vec h = sim.h_nodal(b.t, scen);

    r.visc = du.dot(sim.forms().b_form * du) / dt;
    r.grad_theta = dt * b.theta.dot(f.K_bulk * b.theta);
    r.grad_theta_s = dt * b.theta_s.dot(f.A_surf * b.theta_s);
    r.a_incr_diss = 0.5 * du.dot(f.a_form * du);
    r.achi_incr_diss = 0.5 * dchi.dot(f.A_surf * dchi);
    r.work_F = sim.F_load(b.t, scen).dot(du);

    for (int i = 0; i < f.num_nodes; ++i) r.work_h += dt * f.m_lump[i] * h[i] * b.theta[i];

    for (int k = 0; k < f.num_surface; ++k) {
      const int i = f.surface_nodes[k];
      const double ms = f.ms_lump[k];
      const double gap = th_tr[k] - b.theta_s[k];
      r.heat_exchange += dt * ms * mat.heat_exchange(b.chi[k]) * gap * gap;
      r.frictional_heating +=
          dt * ms * mat.fric_coeff_deriv(gap) * gap * R_mag[k] * std::abs(duT[k] / dt);
      r.friction_work += ms * mat.fric_coeff(gap) * R_mag[k] * b.z[k] * duT[k];
      r.chi_rate += ms * dchi[k] * dchi[k] / dt;
      const double udotdu = b.u[2 * i] * du[2 * i] + b.u[2 * i + 1] * du[2 * i + 1];
      const double usq = b.u[2 * i] * b.u[2 * i] + b.u[2 * i + 1] * b.u[2 * i + 1];
      r.adhesive_coupling += ms * (b.chi[k] * udotdu + 0.5 * usq * dchi[k]);
      r.lambda_release += ms * (mat.latent(b.chi[k]) - mat.latent(a.chi[k])) * b.theta_s[k];
      r.lambda_absorb -= ms * mat.latent_deriv(b.chi[k]) * b.theta_s[k] * dchi[k];
      r.cohesion_work -= ms * mat.cohesion_deriv(b.chi[k]) * dchi[k];
    }
    rows.push_back(r);
  }
  return rows;
}

EnergyCheck energy_check(const std::vector<LedgerRow>& rows, double slack_rel) {
  EnergyCheck out;
  if (rows.size() < 2) return out;

  const LedgerRow& r0 = rows.front();
  const double state0 = r0.Ieps_bulk + r0.Ieps_surf + r0.elastic + r0.penalty +
                        r0.grad_chi_energy + r0.beta_envelope;
  double lhs_incr = 0.0, rhs = 0.0, data_mag = std::abs(state0);
  out.worst_cum_margin = std::numeric_limits<double>::max();

  struct Named {
    const char* name;
    double LedgerRow::* field;
  };
  static const Named nonneg_steps[] = {
      {"visc", &LedgerRow::visc},
      {"grad_theta", &LedgerRow::grad_theta},
      {"grad_theta_s", &LedgerRow::grad_theta_s},
      {"heat_exchange", &LedgerRow::heat_exchange},
      {"frictional_heating", &LedgerRow::frictional_heating},
      {"friction_work", &LedgerRow::friction_work},
      {"chi_rate", &LedgerRow::chi_rate},
      {"a_incr_diss", &LedgerRow::a_incr_diss},
      {"achi_incr_diss", &LedgerRow::achi_incr_diss},
  };
  static const Named nonneg_states[] = {
      {"Ieps_bulk", &LedgerRow::Ieps_bulk},
      {"Ieps_surf", &LedgerRow::Ieps_surf},
      {"elastic", &LedgerRow::elastic},
      {"adhesive", &LedgerRow::adhesive},
      {"penalty", &LedgerRow::penalty},
      {"grad_chi_energy", &LedgerRow::grad_chi_energy},
      {"beta_envelope", &LedgerRow::beta_envelope},
  };

  for (size_t n = 1; n < rows.size(); ++n) {
    const LedgerRow& r = rows[n];
    data_mag += std::abs(r.work_F) + std::abs(r.work_h) + std::abs(r.lambda_release) +
                std::abs(r.lambda_absorb) + std::abs(r.cohesion_work);
    const double slack = slack_rel * (1.0 + data_mag);

    for (const auto& t : nonneg_steps) {
      const double v = r.*(t.field);
      if (v < out.worst_term_value) {
        out.worst_term_value = v;
        out.worst_term = t.name;
        out.worst_term_step = static_cast<int>(n);
      }
      if (v < -slack && out.pass) {
        out.pass = false;
        out.first_failed_step = static_cast<int>(n);
      }
    }
    for (const auto& t : nonneg_states) {
      const double v = r.*(t.field);
      if (v < out.worst_term_value) {
        out.worst_term_value = v;
        out.worst_term = t.name;
        out.worst_term_step = static_cast<int>(n);
      }
      if (v < -slack && out.pass) {
        out.pass = false;
        out.first_failed_step = static_cast<int>(n);
      }
    }

    lhs_incr += r.visc + r.grad_theta + r.grad_theta_s + r.heat_exchange + r.frictional_heating +
                r.friction_work + r.chi_rate + r.a_incr_diss + r.achi_incr_diss +
                r.adhesive_coupling;
    rhs += r.work_F + r.work_h + r.lambda_release + r.lambda_absorb + r.cohesion_work;

    const double state_n = r.Ieps_bulk + r.Ieps_surf + r.elastic + r.penalty +
                           r.grad_chi_energy + r.beta_envelope;
    const double lhs = (state_n - state0) + lhs_incr;
    const double margin = rhs + slack - lhs;
    out.worst_cum_margin = std::min(out.worst_cum_margin, margin);
    if (margin < 0.0 && out.pass) {
      out.pass = false;
      out.first_failed_step = static_cast<int>(n);
    }
  }
  out.data_scale = 1.0 + data_mag;
  return out;
}

DissipationFields dissipation_density(const Simulator& sim, const State& prev,
                                      const State& next) {
  const auto& f = sim.forms();
  const auto& mat = sim.material();
  const auto& mesh = sim.mesh();
  const double dt = next.t - prev.t;

  DissipationFields out;
  const Vec udot = (next.u - prev.u) / dt;
  const ElementStrains es = element_strains(mesh, udot);
  const Vec gth = element_gradient_sq(mesh, next.theta);
  out.bulk = Vec(mesh.triangles.size());
  for (size_t e = 0; e < mesh.triangles.size(); ++e) {
    out.bulk[e] = tensor_quad(mat.K_v, es.e11[e], es.e22[e], es.e12[e]) + gth[e];
  }

  const int ns = f.num_surface;
  const Vec th_tr = f.surface_trace(next.theta);
  const Vec udotT = f.tangential_trace(udot);
  const Vec R_mag = eval_R_magnitude(next.hist);
  Vec node_part(ns);
  for (int k = 0; k < ns; ++k) {
    const double gap = th_tr[k] - next.theta_s[k];
    const double dchidt = (next.chi[k] - prev.chi[k]) / dt;
    node_part[k] = mat.heat_exchange(next.chi[k]) * gap * gap +
                   mat.fric_coeff_deriv(gap) * gap * R_mag[k] * std::abs(udotT[k]) +
                   dchidt * dchidt;
  }
  out.surface = Vec(ns - 1);
  for (int k = 0; k + 1 < ns; ++k) {
    const double len =
        (mesh.nodes[f.surface_nodes[k + 1]] - mesh.nodes[f.surface_nodes[k]]).norm();
    const double grad = (next.theta_s[k + 1] - next.theta_s[k]) / len;
    out.surface[k] = 0.5 * (node_part[k] + node_part[k + 1]) + grad * grad;
  }
  out.min_bulk = out.bulk.minCoeff();
  out.min_surface = out.surface.minCoeff();
  return out;
}

SignoriniResidual signorini_residual(const Simulator& sim, const State& s) {
  const auto& f = sim.forms();
  const auto& reg = sim.reg();
  SignoriniResidual out;
  const int ns = f.num_surface;
  out.penetration = Vec(ns);
  out.pressure_violation = Vec(ns);
  out.complementarity = Vec(ns);
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const Vec uN = f.normal_trace(s.u);
  for (int k = 0; k < ns; ++k) {
    const double pen = phi_eps_prime(uN[k], reg);
    const double sigma_N = -pen - s.chi[k] * uN[k];  // recovered contact pressure
    out.penetration[k] = std::max(uN[k], 0.0);
    out.pressure_violation[k] = std::max(sigma_N + s.chi[k] * uN[k], 0.0);
    out.complementarity[k] = uN[k] * (sigma_N + s.chi[k] * uN[k]);
    s1 += f.ms_lump[k] * out.penetration[k] * out.penetration[k];
    s2 += f.ms_lump[k] * out.pressure_violation[k] * out.pressure_violation[k];
    s3 += f.ms_lump[k] * out.complementarity[k] * out.complementarity[k];
  }
  out.r1 = std::sqrt(s1);
  out.r2 = std::sqrt(s2);
  out.r3 = std::sqrt(s3);
  return out;
}

CoulombResidual coulomb_residual(const Simulator& sim, const State& s) {
  const auto& f = sim.forms();
  CoulombResidual out;
  const int ns = f.num_surface;
  const double dt = s.dt_last > 0.0 ? s.dt_last : 1.0;
  const Vec udotT = f.tangential_trace(Vec(s.u - s.u_prev)) / dt;
  const Vec R_mag = eval_R_magnitude(s.hist);
  out.phase.resize(ns);
  out.violation = Vec::Zero(ns);
  out.min_mu_udot = std::numeric_limits<double>::max();
  for (int k = 0; k < ns; ++k) {
    out.max_abs_z = std::max(out.max_abs_z, std::abs(s.z[k]));
    // |mu| <= |R| always; slip must saturate the bound
    out.violation[k] = std::max(std::abs(s.mu[k]) - R_mag[k], 0.0);
    const bool slip = std::abs(udotT[k]) > sim.tols().slip_tol;
    out.phase[k] = slip ? CoulombResidual::Phase::Slip : CoulombResidual::Phase::Stick;
    if (slip) {
      out.min_slip_abs_z = std::min(out.min_slip_abs_z, std::abs(s.z[k]));
      out.violation[k] = std::max(out.violation[k], std::abs(std::abs(s.mu[k]) - R_mag[k]));
    }
    out.min_mu_udot = std::min(out.min_mu_udot, s.mu[k] * udotT[k]);
  }
  if (ns == 0) out.min_mu_udot = 0.0;
  return out;
}

EstimateMonitors estimate_monitors(const Simulator& sim, const std::vector<State>& traj) {
  const auto& f = sim.forms();
  const auto& reg = sim.reg();
  EstimateMonitors m;
  if (traj.size() < 2) return m;

  Eigen::SimplicialLDLT<SpMat> bulk_dual(SpMat(f.M_bulk + f.K_bulk));
  const Mat surf_dual = (f.M_surf + f.A_surf).eval();
  Eigen::LDLT<Mat> surf_dual_ldlt(surf_dual);

  double th_L2V = 0.0, ths_L2V = 0.0, u_H1 = 0.0, chi_H1 = 0.0, eta_L2 = 0.0, th_neg = 0.0;
  for (size_t n = 0; n < traj.size(); ++n) {
    const State& s = traj[n];
    const double dt = n == 0 ? 0.0 : s.t - traj[n - 1].t;
    const double thH = std::sqrt(s.theta.dot(f.M_bulk * s.theta));
    const double thsH = std::sqrt(s.theta_s.dot(f.M_surf * s.theta_s));

    m.sqrt_eps_theta_LinfH =
        std::max(m.sqrt_eps_theta_LinfH, std::sqrt(reg.eps) * std::max(thH, thsH));
    double l1 = 0.0;
    for (int i = 0; i < f.num_nodes; ++i) l1 += f.m_lump[i] * std::abs(s.theta[i]);
    m.theta_LinfL1 = std::max(m.theta_LinfL1, l1);
    l1 = 0.0;
    for (int k = 0; k < f.num_surface; ++k) l1 += f.ms_lump[k] * std::abs(s.theta_s[k]);
    m.thetas_LinfL1 = std::max(m.thetas_LinfL1, l1);

    double LH = 0.0, LHs = 0.0;
    for (int i = 0; i < f.num_nodes; ++i) {
      const double v = L_eps(s.theta[i], reg);
      LH += f.m_lump[i] * v * v;
    }
    for (int k = 0; k < f.num_surface; ++k) {
      const double v = L_eps(s.theta_s[k], reg);
      LHs += f.ms_lump[k] * v * v;
    }
    m.Leps_theta_LinfH = std::max(m.Leps_theta_LinfH, std::sqrt(LH));
    m.Leps_thetas_LinfH = std::max(m.Leps_thetas_LinfH, std::sqrt(LHs));

    m.chi_LinfV = std::max(
        m.chi_LinfV, std::sqrt(s.chi.dot(f.M_surf * s.chi) + s.chi.dot(f.A_surf * s.chi)));

    double muL2 = 0.0;
    for (int k = 0; k < f.num_surface; ++k) {
      muL2 += f.ms_lump[k] * s.mu[k] * s.mu[k];
      m.mu_Linf_node = std::max(m.mu_Linf_node, std::abs(s.mu[k]));
    }
    m.mu_LinfL2 = std::max(m.mu_LinfL2, std::sqrt(muL2));

    if (n == 0) continue;
    th_L2V += dt * (s.theta.dot(f.M_bulk * s.theta) + s.theta.dot(f.K_bulk * s.theta));
    ths_L2V += dt * (s.theta_s.dot(f.M_surf * s.theta_s) + s.theta_s.dot(f.A_surf * s.theta_s));
    const Vec udot = (s.u - traj[n - 1].u) / dt;
    u_H1 += dt * (s.u.dot(f.G_vec * s.u) + udot.dot(f.G_vec * udot));
    const Vec chidot = (s.chi - traj[n - 1].chi) / dt;
    chi_H1 += dt * chidot.dot(f.M_surf * chidot);
    for (int k = 0; k < f.num_surface; ++k)
      eta_L2 += dt * f.ms_lump[k] * s.eta_n[k] * s.eta_n[k];
    for (int i = 0; i < f.num_nodes; ++i) {
      const double neg = std::min(s.theta[i], 0.0);
      th_neg += dt * f.m_lump[i] * neg * neg;
    }

    const Vec dth = f.M_bulk * Vec(s.theta - traj[n - 1].theta);
    m.bv_theta_dual += std::sqrt(dth.dot(bulk_dual.solve(dth)));
    const Vec dths = f.M_surf * Vec(s.theta_s - traj[n - 1].theta_s);
    m.bv_thetas_dual += std::sqrt(dths.dot(surf_dual_ldlt.solve(dths)));
  }
  m.theta_L2V = std::sqrt(th_L2V);
  m.thetas_L2V = std::sqrt(ths_L2V);
  m.u_H1W = std::sqrt(u_H1);
  m.chi_H1H = std::sqrt(chi_H1);
  m.eta_L2 = std::sqrt(eta_L2);
  m.theta_neg_L2L2 = std::sqrt(th_neg);
  return m;
}

std::vector<std::pair<std::string, double>> monitor_values(const EstimateMonitors& m) {
  return {{"sqrt_eps_theta_LinfH", m.sqrt_eps_theta_LinfH},
          {"theta_L2V", m.theta_L2V},
          {"theta_LinfL1", m.theta_LinfL1},
          {"thetas_L2V", m.thetas_L2V},
          {"thetas_LinfL1", m.thetas_LinfL1},
          {"u_H1W", m.u_H1W},
          {"chi_LinfV", m.chi_LinfV},
          {"chi_H1H", m.chi_H1H},
          {"eta_L2", m.eta_L2},
          {"mu_LinfL2", m.mu_LinfL2},
          {"mu_Linf_node", m.mu_Linf_node},
          {"Leps_theta_LinfH", m.Leps_theta_LinfH},
          {"Leps_thetas_LinfH", m.Leps_thetas_LinfH},
          {"bv_theta_dual", m.bv_theta_dual},
          {"bv_thetas_dual", m.bv_thetas_dual},
          {"theta_neg_L2L2", m.theta_neg_L2L2}};
}

std::vector<CauchyRow> eps_convergence_study(const Simulator& sim,
                                             const std::vector<double>& eps_values,
                                             const std::vector<std::vector<State>>& trajectories) {
  const auto& f = sim.forms();
  std::vector<CauchyRow> out;
  for (size_t a = 0; a + 1 < trajectories.size(); ++a) {
    const auto& ta = trajectories[a];
    const auto& tb = trajectories[a + 1];
    const size_t n = std::min(ta.size(), tb.size());
    CauchyRow row;
    row.eps_hi = eps_values[a];
    row.eps_lo = eps_values[a + 1];
    double d_th = 0.0, d_ths = 0.0, d_u = 0.0;
    for (size_t k = 1; k < n; ++k) {
      const double dt = ta[k].t - ta[k - 1].t;
      const Vec dth = ta[k].theta - tb[k].theta;
      const Vec dths = ta[k].theta_s - tb[k].theta_s;
      const Vec du = ta[k].u - tb[k].u;
      d_th += dt * dth.dot(f.M_bulk * dth);
      d_ths += dt * dths.dot(f.M_surf * dths);
      d_u = std::max(d_u, std::sqrt(du.dot(f.G_vec * du)));
    }
    row.d_theta = std::sqrt(d_th);
    row.d_theta_s = std::sqrt(d_ths);
    row.d_u = d_u;
    row.total = row.d_theta + row.d_theta_s + row.d_u;
    out.push_back(row);
  }
  return out;
}

}  // namespace tac
