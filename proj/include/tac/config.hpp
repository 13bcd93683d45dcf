#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tac/material.hpp"
#include "tac/regularization.hpp"
#include "tac/scenario.hpp"
#include "tac/solvers.hpp"

namespace tac {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key-value run configuration with dotted section names. Grammar:
/// one `key = value` per line, `#` starts a comment, blank lines ignored.
/// Unknown keys are rejected; all positivity/range constraints re-validated
/// on load.
struct RunConfig {
  int mesh_n = 8;

  double dt = 0.02;
  double T = 1.0;

  std::vector<double> eps_list = {0.05};  // reg.eps: scalar or comma list
  double root_tol = 1e-12;
  int quad_points = 64;

  double E = 1.0, nu = 0.3, E_v = 0.5, nu_v = 0.3;
  double c1 = 0.3, w_s = 1.0, lambda_c = 0.5, k0 = 1.0, kernel_rho = 0.25;

  std::string preset = "benchmark";
  double amp_f = 0.6, amp_g = 0.3, amp_h = 0.5;
  double ramp_f = 0.2, ramp_g = 0.4;
  double theta0 = 1.0, theta_s0 = 1.25, chi0 = 0.9;

  std::string output_dir = "out";
  int stride = 1;

  SolverTols tols;
  double energy_slack = 1e-8;
  double dissip_tol = 1e-10;

  unsigned long long seed = 12345;

  MaterialModel material() const;
  Scenario scenario() const;
  RegularizationParams reg(double eps) const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace tac
