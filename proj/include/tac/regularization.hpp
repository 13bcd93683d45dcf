#pragma once

#include <stdexcept>

namespace tac {

/// Parameters of the Yosida/Moreau smoothing layer. All maps below are pure
/// functions of (argument, params) and safe to call concurrently.
struct RegularizationParams {
  double eps = 0.05;        // smoothing parameter, > 0
  double root_tol = 1e-12;  // absolute tolerance of the scalar root finder
  int quad_points = 64;     // quadrature panels for smoothed_log_energy, >= 8

  void validate() const {
    if (!(eps > 0.0)) throw std::invalid_argument("RegularizationParams: eps must be > 0");
    if (!(root_tol > 0.0)) throw std::invalid_argument("RegularizationParams: root_tol must be > 0");
    if (quad_points < 8) throw std::invalid_argument("RegularizationParams: quad_points must be >= 8");
  }
};

// Resolvent of ln: the unique r > 0 with r + eps*ln(r) = x. Deep in the
// negative range (x/eps below about -700) the root drops under the smallest
// subnormal; the correctly rounded value exp(x/eps) (possibly 0.0) is
// returned there.
double resolvent_ln(double x, const RegularizationParams& p);

// Yosida regularization of ln:  ln_eps(x) = (x - resolvent_ln(x)) / eps.
double ln_eps(double x, const RegularizationParams& p);

// Derivative ln_eps'(x) = 1 / (resolvent_ln(x) + eps); lies in (0, 1/eps).
double ln_eps_prime(double x, const RegularizationParams& p);

// Smoothed logarithm used in the temperature equations:
//   L_eps(x) = eps*x + ln_eps(x), with eps < L_eps' <= eps + 2/eps.
double L_eps(double x, const RegularizationParams& p);
double L_eps_prime(double x, const RegularizationParams& p);
double L_eps_inv(double y, const RegularizationParams& p);

// Temperature energy density  I_eps(x) = integral_0^x s * L_eps'(s) ds,
// evaluated by composite fixed-order Gauss quadrature (quad_points panels).
// Nonnegative, I_eps(0) = 0.
double I_eps(double x, const RegularizationParams& p);

// Normal-compliance penalty: Yosida of the subdifferential of I_(-inf,0]
// and its Moreau envelope.
//   phi_eps_prime(x) = max(x,0)/eps,  phi_eps(x) = max(x,0)^2/(2 eps)
double phi_eps(double x, const RegularizationParams& p);
double phi_eps_prime(double x, const RegularizationParams& p);

// Yosida of the subdifferential of I_[0,1] and its Moreau envelope:
//   beta_eps(x) = (min(x,0) + max(x-1,0))/eps,  beta_env = dist(x,[0,1])^2/(2 eps)
double beta_eps(double x, const RegularizationParams& p);
double beta_env(double x, const RegularizationParams& p);
// A.e. derivative of beta_eps (0 inside [0,1], 1/eps outside).
double beta_eps_prime(double x, const RegularizationParams& p);

/// Set value of the friction direction map d = subdifferential of |v_T|:
/// the singleton {sign(v_T)} away from 0, the full interval [-1,1] at 0.
struct SignInterval {
  double lo = -1.0;
  double hi = 1.0;
  bool is_singleton() const { return lo == hi; }
};
SignInterval d_subdiff(double v_tangential);

}  // namespace tac
