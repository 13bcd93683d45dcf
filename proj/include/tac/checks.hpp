#pragma once

#include <string>
#include <vector>

#include "tac/material.hpp"
#include "tac/regularization.hpp"

namespace tac {

struct CheckResult {
  std::string name;
  bool pass = true;
  bool skipped = false;
  double worst = 0.0;  // worst violation found (<= 0 means none)
  std::string note;
};

/// The five closed-form inequality suites of the smoothing layer, sampled at
/// n_samples points per eps:
///   ln_eps'(x) <= 2/x for x > 0          (requires eps <= eps_star = 0.5, else skipped)
///   ln_eps'(x) >= 1/(|x|+2+eps)
///   eps < L_eps'(x) <= eps + 2/eps
///   |1/L_eps'(x)-1/L_eps'(y)| <= |x-y|
///   |rho_eps(x)-rho_eps(y)| <= |x-y|
std::vector<CheckResult> lemma_inequality_suite(const std::vector<double>& eps_values,
                                                int n_samples, double tol, unsigned long long seed);

/// rho_eps(1) = 1 and ln_eps(e+1)|_{eps=1} = 1.
std::vector<CheckResult> resolvent_identity_checks(double tol);

/// Energy-density bounds (upper for x >= 0 and small eps, lower with the
/// frozen fitted constants C1 = 0.5, C2) plus a quadrature refinement check.
std::vector<CheckResult> energy_density_checks(double tol, unsigned long long seed);

/// Mesh/assembly sanity at size n: structured counts, patch test, Korn
/// ellipticity eigenvalues, surface-stiffness kernel.
std::vector<CheckResult> mesh_assembly_checks(int n, const MaterialModel& material);

/// Frozen constants of the energy-density lower bound (one-time numerical fit
/// over eps in (0,1], |x| <= 1e6; not paper ground truth). The fit maximum of
/// 0.5|x| - (I_eps(x) - eps x^2/2) was 0.58, frozen with margin.
inline constexpr double kEnergyLowerC1 = 0.5;
inline constexpr double kEnergyLowerC2 = 1.0;

bool all_pass(const std::vector<CheckResult>& results);
std::string render_checks(const std::vector<CheckResult>& results);

}  // namespace tac
