#include "tac/checks.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "tac/assembly.hpp"
#include "tac/mesh.hpp"

namespace tac {

namespace {

constexpr double kEpsStar = 0.5;  // fixed concrete eps* of the upper bound

std::string eps_tag(double eps) {
  std::ostringstream os;
  os << "eps=" << eps;
  return os.str();
}

}  // namespace

std::vector<CheckResult> lemma_inequality_suite(const std::vector<double>& eps_values,
                                                int n_samples, double tol,
                                                unsigned long long seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1e3, 1e3);
  std::uniform_real_distribution<double> logu(std::log(1e-6), std::log(1e6));

  for (double eps : eps_values) {
    RegularizationParams p;
    p.eps = eps;
    const std::string tag = eps_tag(eps);

    {
      CheckResult c;
      c.name = "upper bound ln_eps' <= 2/x (x>0), " + tag;
      if (eps > kEpsStar) {
        c.skipped = true;
        c.note = "skipped: eps above the concrete eps* = 0.5";
      } else {
        double worst = 0.0;
        for (int i = 0; i < n_samples; ++i) {
          const double x = std::exp(logu(rng));
          worst = std::max(worst, ln_eps_prime(x, p) - 2.0 / x);
        }
        c.worst = worst;
        c.pass = worst <= tol;
      }
      out.push_back(c);
    }
    {
      CheckResult c;
      c.name = "lower bound ln_eps' >= 1/(|x|+2+eps), " + tag;
      double worst = 0.0;
      for (int i = 0; i < n_samples; ++i) {
        const double x = uni(rng);
        worst = std::max(worst, 1.0 / (std::abs(x) + 2.0 + eps) - ln_eps_prime(x, p));
      }
      c.worst = worst;
      c.pass = worst <= tol;
      out.push_back(c);
    }
    {
      CheckResult c;
      c.name = "bi-Lipschitz eps < L_eps' <= eps + 2/eps, " + tag;
      double worst = 0.0;
      for (int i = 0; i < n_samples; ++i) {
        const double x = uni(rng);
        const double d = L_eps_prime(x, p);
        worst = std::max({worst, eps - d, d - (eps + 2.0 / eps)});
      }
      c.worst = worst;
      c.pass = worst <= tol;
      out.push_back(c);
    }
    {
      CheckResult c;
      c.name = "contraction of 1/L_eps', " + tag;
      double worst = 0.0;
      for (int i = 0; i < n_samples; ++i) {
        const double x = uni(rng), y = uni(rng);
        worst = std::max(worst, std::abs(1.0 / L_eps_prime(x, p) - 1.0 / L_eps_prime(y, p)) -
                                    std::abs(x - y));
      }
      c.worst = worst;
      c.pass = worst <= tol;
      out.push_back(c);
    }
    {
      CheckResult c;
      c.name = "contraction of the resolvent rho_eps, " + tag;
      double worst = 0.0;
      for (int i = 0; i < n_samples; ++i) {
        const double x = uni(rng), y = uni(rng);
        worst = std::max(worst,
                         std::abs(resolvent_ln(x, p) - resolvent_ln(y, p)) - std::abs(x - y));
      }
      c.worst = worst;
      c.pass = worst <= tol;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<CheckResult> resolvent_identity_checks(double tol) {
  std::vector<CheckResult> out;
  {
    RegularizationParams p;
    p.eps = 0.37;  // identity holds for every eps
    CheckResult c;
      c.name = "resolvent identity rho_eps(1) = 1";
    c.worst = std::abs(resolvent_ln(1.0, p) - 1.0);
    c.pass = c.worst <= tol;
    out.push_back(c);
  }
  {
    RegularizationParams p;
    p.eps = 1.0;
    CheckResult c;
      c.name = "ln_eps(e+1) = 1 at eps = 1";
    c.worst = std::abs(ln_eps(std::exp(1.0) + 1.0, p) - 1.0);
    c.pass = c.worst <= tol;
    out.push_back(c);
  }
  return out;
}

std::vector<CheckResult> energy_density_checks(double tol, unsigned long long seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-30.0, 30.0);
  const std::vector<double> eps_values{0.5, 0.1, 0.01, 0.001};

  {
    CheckResult c;
      c.name = "energy density upper bound I_eps(x) <= eps x^2/2 + 2x (x >= 0)";
    double worst = 0.0;
    for (double eps : eps_values) {
      RegularizationParams p;
      p.eps = eps;
      for (int i = 0; i < 200; ++i) {
        const double x = std::abs(uni(rng));
        worst = std::max(worst, I_eps(x, p) - (0.5 * eps * x * x + 2.0 * x));
      }
    }
    c.worst = worst;
    c.pass = worst <= tol;
    out.push_back(c);
  }
  {
    CheckResult c;
      c.name = "energy density lower bound with frozen C1, C2";
    double worst = 0.0;
    for (double eps : eps_values) {
      RegularizationParams p;
      p.eps = eps;
      for (int i = 0; i < 200; ++i) {
        const double x = uni(rng);
        worst = std::max(worst, 0.5 * eps * x * x + kEnergyLowerC1 * std::abs(x) -
                                    kEnergyLowerC2 - I_eps(x, p));
      }
    }
    c.worst = worst;
    c.pass = worst <= tol;
    out.push_back(c);
  }
  {
    CheckResult c;
      c.name = "quadrature refinement of I_eps stable to 1e-10";
    RegularizationParams coarse, fine;
    coarse.eps = fine.eps = 0.05;
    coarse.quad_points = 16;
    fine.quad_points = 128;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double x = uni(rng);
      worst = std::max(worst, std::abs(I_eps(x, coarse) - I_eps(x, fine)));
    }
    c.worst = worst;
    c.pass = worst <= 1e-10;
    out.push_back(c);
  }
  return out;
}

std::vector<CheckResult> mesh_assembly_checks(int n, const MaterialModel& material) {
  std::vector<CheckResult> out;
  const Mesh mesh = build_unit_square_mesh(n);
  const AssembledForms f = assemble(mesh, material);

  {
    CheckResult c;
      c.name = "structured mesh counts";
    c.pass = static_cast<int>(mesh.triangles.size()) == 2 * n * n &&
             mesh.num_nodes() == (n + 1) * (n + 1) && mesh.num_surface_nodes() == n + 1;
    out.push_back(c);
  }
  {
    // patch test: energy of a linear displacement field against closed form
    CheckResult c;
      c.name = "patch test: linear field energy exact";
    Vec u(2 * mesh.num_nodes());
    const double e11 = 0.3, e22 = -0.2, e12 = 0.15;
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      const Vec2& x = mesh.nodes[i];
      u[2 * i] = e11 * x.x() + e12 * x.y();
      u[2 * i + 1] = e12 * x.x() + e22 * x.y();
    }
    const double energy = u.dot(f.a_form * u);
    const double exact = tensor_quad(material.K_e, e11, e22, e12);  // unit area
    c.worst = std::abs(energy - exact);
    c.pass = c.worst <= 1e-12 * (1.0 + std::abs(exact));
    out.push_back(c);
  }
  {
    CheckResult c;
      c.name = "Korn ellipticity: constrained eigenvalues positive";
    const double ca = f.min_constrained_eigenvalue(f.a_form);
    const double cb = f.min_constrained_eigenvalue(f.b_form);
    std::ostringstream os;
    os << "C_a=" << ca << " C_b=" << cb;
    c.note = os.str();
    c.pass = ca > 0.0 && cb > 0.0;
    c.worst = -std::min(ca, cb);
    out.push_back(c);
  }
  {
    CheckResult c;
      c.name = "surface stiffness annihilates exactly the constants";
    Eigen::SelfAdjointEigenSolver<Mat> es(f.A_surf);
    const Vec ev = es.eigenvalues();
    c.pass = std::abs(ev[0]) <= 1e-12 && ev[1] > 1e-12;
    out.push_back(c);
  }
  return out;
}

bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass && !r.skipped) return false;
  return true;
}

std::string render_checks(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.skipped ? "[skip] " : (r.pass ? "[ok]   " : "[FAIL] ")) << r.name;
    if (!r.skipped && r.worst != 0.0) os << "  (worst violation " << r.worst << ")";
    if (!r.note.empty()) os << "  " << r.note;
    os << '\n';
  }
  return os.str();
}

}  // namespace tac
