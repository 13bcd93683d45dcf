#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tac/types.hpp"

namespace tac {

/// Constitutive layer. K_e / K_v are constant 4th-order tensors in 2-D Voigt
/// form (rows/cols ordered e_xx, e_yy, gamma_xy with engineering shear), so
/// strain energy density = 0.5 * e^T C e. The scalar nonlinearities are stored
/// as callables so tests can substitute pathological ones; the defaults are
///   fric_coeff(x)  = x*atan(x) - ln(1+x^2)/2 + c1      (friction coefficient)
///   heat_exchange(x) = k0 * max(x, 0)
///   latent(x)      = lambda_c * x
///   cohesion(x)    = w_s * (1 - x)
/// Adhesive stiffness constants c_N = c_T = kappa_s = 1 are fixed.
struct MaterialModel {
  Mat K_e = Mat::Zero(3, 3);
  Mat K_v = Mat::Zero(3, 3);

  double c1 = 0.3;                 // lower bound of the friction coefficient
  double c2 = 1.5707963267948966;  // bound on |fric_coeff'| (pi/2 for default)
  double w_s = 1.0;                // cohesion constant
  double lambda_c = 0.5;           // latent heat slope
  double k0 = 1.0;                 // heat exchange slope
  double kernel_rho = 0.25;        // nonlocal kernel width

  std::function<double(double)> fric_coeff, fric_coeff_deriv;
  std::function<double(double)> heat_exchange;
  std::function<double(double)> latent, latent_deriv;
  std::function<double(double)> cohesion, cohesion_deriv;

  static MaterialModel defaults(double E = 1.0, double nu = 0.3, double E_v = 0.5,
                                double nu_v = 0.3);
};

/// Plane-strain isotropic Voigt matrix for Young modulus E, Poisson ratio nu.
Mat isotropic_voigt(double E, double nu);

/// Quadratic form xi : C : xi for a symmetric 2x2 strain xi (Voigt C).
double tensor_quad(const Mat& C, double xi11, double xi22, double xi12);

double default_friction_coeff(double x, double c1);
double default_cohesion_sigma(double chi, double w_s);

struct HypothesisReport {
  struct Item {
    std::string name;
    bool pass = true;
    std::string witness;  // sample that broke the hypothesis, empty when pass
  };
  std::vector<Item> items;
  bool all_pass() const;
  std::string summary() const;
};

/// Samples Hypotheses (I)-(V): friction coefficient bounds and monotone sign,
/// heat-exchange nonnegativity + Lipschitz, Lipschitz derivative of latent and
/// cohesion, tensor symmetry and ellipticity. Report-only.
HypothesisReport validate_hypotheses(const MaterialModel& m, unsigned seed = 20120719u);

/// Bulk free energy density  theta(1-ln theta) + theta tr(eps) + eps:K_e:eps/2.
/// Defined for theta > 0.
double bulk_free_energy(const MaterialModel& m, double theta, double e11, double e22, double e12);

/// Contact-surface free energy density at an admissible state (chi in [0,1],
/// u_N <= 0; the indicator contributions vanish there, +inf otherwise).
double surface_free_energy(const MaterialModel& m, double theta_s, double chi, double grad_chi,
                           double u_N, double u_T);

}  // namespace tac
