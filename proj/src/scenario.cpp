#include "tac/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace tac {

namespace {

double smoothstep(double t, double ramp) {
  if (ramp <= 0.0) return 1.0;
  const double s = std::clamp(t / ramp, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

}  // namespace

Scenario make_preset(const std::string& name, const PresetParams& p) {
  Scenario s;
  s.name = name;
  s.T_final = p.T_final;
  s.dt = p.dt;
  s.theta0 = [v = p.theta0](const Vec2&) { return v; };
  s.theta_s0 = [v = p.theta_s0](double) { return v; };
  s.chi0 = [v = p.chi0](double) { return v; };

  if (name == "zero") {
    return s;  // all sources zero, uniform initial data from the knobs
  }
  if (name == "traction-slip") {
    s.f = [p](double t, const Vec2&) { return Vec2(0.0, -p.amp_f * smoothstep(t, p.ramp_f)); };
    s.g = [p](double t, const Vec2&) { return Vec2(p.amp_g * smoothstep(t, p.ramp_g), 0.0); };
    return s;
  }
  if (name == "thermal-debond") {
    s.f = [p](double t, const Vec2&) { return Vec2(0.0, -p.amp_f * smoothstep(t, p.ramp_f)); };
    return s;
  }
  if (name == "benchmark") {
    s.f = [p](double t, const Vec2&) { return Vec2(0.0, -p.amp_f * smoothstep(t, p.ramp_f)); };
    s.g = [p](double t, const Vec2&) { return Vec2(p.amp_g * smoothstep(t, p.ramp_g), 0.0); };
    s.h = [p](double t, const Vec2& x) {
      return p.amp_h * smoothstep(t, p.ramp_f) * std::sin(M_PI * x.x()) * x.y();
    };
    return s;
  }
  throw std::invalid_argument("make_preset: unknown preset '" + name + "'");
}

InitialFields interpolate_initial_data(const Scenario& s, const Mesh& mesh,
                                       const AssembledForms& forms) {
  InitialFields out;
  const int nn = mesh.num_nodes();
  const int ns = mesh.num_surface_nodes();
  out.theta.resize(nn);
  out.u.resize(2 * nn);
  for (int i = 0; i < nn; ++i) {
    out.theta[i] = s.theta0(mesh.nodes[i]);
    const Vec2 ui = s.u0(mesh.nodes[i]);
    out.u[2 * i] = ui.x();
    out.u[2 * i + 1] = ui.y();
    if (!(out.theta[i] > 0.0))
      throw std::invalid_argument("scenario: theta0 must be > 0 nodewise");
  }
  const auto clamped = mesh.gamma1_node_mask();
  for (int i = 0; i < nn; ++i) {
    if (clamped[i]) out.u[2 * i] = out.u[2 * i + 1] = 0.0;
  }
  out.theta_s.resize(ns);
  out.chi.resize(ns);
  for (int k = 0; k < ns; ++k) {
    const double x = mesh.nodes[mesh.surface_nodes[k]].x();
    out.theta_s[k] = s.theta_s0(x);
    out.chi[k] = s.chi0(x);
    if (!(out.theta_s[k] > 0.0))
      throw std::invalid_argument("scenario: theta_s0 must be > 0 nodewise");
    if (out.chi[k] < 0.0 || out.chi[k] > 1.0)
      throw std::invalid_argument("scenario: chi0 must lie in [0,1] nodewise");
  }
  const Vec uN = forms.normal_trace(out.u);
  for (int k = 0; k < ns; ++k) {
    if (uN[k] > 0.0)
      throw std::invalid_argument("scenario: u0 must satisfy u_N <= 0 on GammaC");
  }
  return out;
}

}  // namespace tac
