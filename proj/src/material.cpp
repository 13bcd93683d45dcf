#include "tac/material.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace tac {

Mat isotropic_voigt(double E, double nu) {
  const double lame = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double mu = E / (2.0 * (1.0 + nu));
  Mat C = Mat::Zero(3, 3);
  C(0, 0) = C(1, 1) = lame + 2.0 * mu;
  C(0, 1) = C(1, 0) = lame;
  C(2, 2) = mu;
  return C;
}

double tensor_quad(const Mat& C, double xi11, double xi22, double xi12) {
  Eigen::Vector3d v(xi11, xi22, 2.0 * xi12);
  return v.dot(C * v);
}

double default_friction_coeff(double x, double c1) {
  return x * std::atan(x) - 0.5 * std::log1p(x * x) + c1;
}

double default_cohesion_sigma(double chi, double w_s) { return w_s * (1.0 - chi); }

MaterialModel MaterialModel::defaults(double E, double nu, double E_v, double nu_v) {
  MaterialModel m;
  m.K_e = isotropic_voigt(E, nu);
  m.K_v = isotropic_voigt(E_v, nu_v);
  const double c1 = m.c1, w_s = m.w_s, lam = m.lambda_c, k0 = m.k0;
  m.fric_coeff = [c1](double x) { return default_friction_coeff(x, c1); };
  m.fric_coeff_deriv = [](double x) { return std::atan(x); };
  m.heat_exchange = [k0](double x) { return k0 * std::max(x, 0.0); };
  m.latent = [lam](double x) { return lam * x; };
  m.latent_deriv = [lam](double) { return lam; };
  m.cohesion = [w_s](double x) { return default_cohesion_sigma(x, w_s); };
  m.cohesion_deriv = [w_s](double) { return -w_s; };
  return m;
}

bool HypothesisReport::all_pass() const {
  for (const auto& it : items)
    if (!it.pass) return false;
  return true;
}

std::string HypothesisReport::summary() const {
  std::ostringstream os;
  for (const auto& it : items) {
    os << (it.pass ? "  [ok]   " : "  [FAIL] ") << it.name;
    if (!it.pass) os << "  (witness: " << it.witness << ")";
    os << '\n';
  }
  return os.str();
}

HypothesisReport validate_hypotheses(const MaterialModel& m, unsigned seed) {
  HypothesisReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> span(-50.0, 50.0);

  auto add = [&rep](const std::string& name, bool pass, const std::string& witness) {
    rep.items.push_back({name, pass, pass ? "" : witness});
  };
  auto wit = [](double x) {
    std::ostringstream os;
    os.precision(17);
    os << "x=" << x;
    return os.str();
  };

  // (I) friction coefficient: >= c1 > 0, |c'| <= c2, c'(x) x >= 0
  {
    bool pos = m.c1 > 0.0, bnd = true, sgn = true;
    double wp = 0, wb = 0, ws = 0;
    for (int i = 0; i < 4000; ++i) {
      const double x = span(rng);
      if (m.fric_coeff(x) < m.c1 - 1e-12) { pos = false; wp = x; break; }
      if (std::abs(m.fric_coeff_deriv(x)) > m.c2 + 1e-12) { bnd = false; wb = x; }
      if (m.fric_coeff_deriv(x) * x < -1e-12) { sgn = false; ws = x; }
    }
    add("(I) fric_coeff >= c1 > 0", pos, wit(wp));
    add("(I) |fric_coeff'| <= c2", bnd, wit(wb));
    add("(I) fric_coeff'(x)*x >= 0", sgn, wit(ws));
  }
  // (V) k >= 0 and Lipschitz; lambda', sigma' Lipschitz (sampled difference quotients)
  {
    bool knn = true, klip = true;
    double wk = 0, wl = 0;
    double kL = 0.0;
    for (int i = 0; i < 4000; ++i) {
      const double x = span(rng), y = span(rng);
      if (m.heat_exchange(x) < -1e-12) { knn = false; wk = x; }
      if (x != y) kL = std::max(kL, std::abs(m.heat_exchange(x) - m.heat_exchange(y)) / std::abs(x - y));
    }
    klip = std::isfinite(kL);
    add("(V) heat_exchange >= 0", knn, wit(wk));
    add("(V) heat_exchange Lipschitz (sampled)", klip, wit(wl));

    double lamL = 0.0, sigL = 0.0;
    for (int i = 0; i < 4000; ++i) {
      const double x = span(rng), y = span(rng);
      if (x == y) continue;
      lamL = std::max(lamL, std::abs(m.latent_deriv(x) - m.latent_deriv(y)) / std::abs(x - y));
      sigL = std::max(sigL, std::abs(m.cohesion_deriv(x) - m.cohesion_deriv(y)) / std::abs(x - y));
    }
    add("(V) latent' Lipschitz (sampled)", std::isfinite(lamL), "");
    add("(V) cohesion' Lipschitz (sampled)", std::isfinite(sigL), "");
  }
  // Tensor symmetry and ellipticity by sampling random symmetric strains.
  {
    auto check_tensor = [&](const Mat& C, const std::string& label) {
      bool sym = (C - C.transpose()).norm() <= 1e-14 * (1.0 + C.norm());
      add(label + " symmetric", sym, "");
      double alpha = std::numeric_limits<double>::max();
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int i = 0; i < 2000; ++i) {
        double a = u(rng), b = u(rng), c = u(rng);
        const double n2 = a * a + b * b + 2.0 * c * c;
        if (n2 < 1e-12) continue;
        alpha = std::min(alpha, tensor_quad(C, a, b, c) / n2);
      }
      std::ostringstream os;
      os << "min sampled Rayleigh quotient " << alpha;
      add(label + " elliptic (alpha_0 > 0)", alpha > 0.0, os.str());
    };
    check_tensor(m.K_e, "K_e");
    check_tensor(m.K_v, "K_v");
  }
  return rep;
}

double bulk_free_energy(const MaterialModel& m, double theta, double e11, double e22,
                        double e12) {
  return theta * (1.0 - std::log(theta)) + theta * (e11 + e22) +
         0.5 * tensor_quad(m.K_e, e11, e22, e12);
}

double surface_free_energy(const MaterialModel& m, double theta_s, double chi, double grad_chi,
                           double u_N, double u_T) {
  if (chi < 0.0 || chi > 1.0 || u_N > 0.0) return std::numeric_limits<double>::infinity();
  // theta_eq is folded into cohesion' as in the variational formulation, so
  // the latent term here carries theta_s alone.
  return theta_s * (1.0 - std::log(theta_s)) + m.latent(chi) * theta_s + m.cohesion(chi) +
         0.5 * chi * u_N * u_N + 0.5 * chi * u_T * u_T + 0.5 * grad_chi * grad_chi;
}

}  // namespace tac
