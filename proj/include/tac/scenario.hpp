#pragma once

#include <functional>
#include <string>

#include "tac/assembly.hpp"
#include "tac/types.hpp"

namespace tac {

/// Problem data: sources, tractions and initial fields as closures of (t, x).
/// Immutable after construction.
struct Scenario {
  std::string name = "custom";

  std::function<double(double, const Vec2&)> h =
      [](double, const Vec2&) { return 0.0; };  // bulk entropy source
  std::function<Vec2(double, const Vec2&)> f =
      [](double, const Vec2&) { return Vec2::Zero(); };  // body force
  std::function<Vec2(double, const Vec2&)> g =
      [](double, const Vec2&) { return Vec2::Zero(); };  // traction on Gamma2

  std::function<double(const Vec2&)> theta0 = [](const Vec2&) { return 1.0; };
  std::function<double(double)> theta_s0 = [](double) { return 1.0; };  // of x on GammaC
  std::function<Vec2(const Vec2&)> u0 = [](const Vec2&) { return Vec2::Zero(); };
  std::function<double(double)> chi0 = [](double) { return 1.0; };      // of x on GammaC

  double T_final = 1.0;
  double dt = 0.02;
};

/// Amplitude and shape knobs of the shipped presets.
struct PresetParams {
  double amp_f = 0.6;    // downward body-force amplitude
  double amp_g = 0.3;    // lateral traction amplitude
  double amp_h = 0.5;    // bulk entropy source amplitude
  double ramp_f = 0.2;   // smoothstep ramp time of f
  double ramp_g = 0.4;   // smoothstep ramp time of g
  double theta0 = 1.0;
  double theta_s0 = 1.25;
  double chi0 = 0.9;
  double T_final = 1.0;
  double dt = 0.02;
};

/// Presets: "zero", "traction-slip", "thermal-debond", "benchmark".
/// Throws std::invalid_argument for unknown names.
Scenario make_preset(const std::string& name, const PresetParams& p = {});

/// Nodal interpolation of initial data plus the admissibility checks
/// (chi0 in [0,1], u0_N <= 0, theta0 and theta_s0 > 0 nodewise).
/// Throws std::invalid_argument on violation.
struct InitialFields {
  Vec theta;    // bulk nodes
  Vec theta_s;  // surface nodes
  Vec u;        // interleaved, zero on Gamma1
  Vec chi;      // surface nodes
};
InitialFields interpolate_initial_data(const Scenario& s, const Mesh& mesh,
                                       const AssembledForms& forms);

}  // namespace tac
