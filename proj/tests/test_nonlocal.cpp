#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tac/nonlocal.hpp"

using namespace tac;

namespace {

struct Setup {
  Mesh mesh = build_unit_square_mesh(4);
  AssembledForms forms = assemble(mesh, MaterialModel::defaults());
};

}  // namespace

TEST_CASE("history accumulator slab updates") {
  Setup s;
  const int ns = s.forms.num_surface;
  const KernelMatrix unit = build_kernel(s.mesh, s.forms, [](double, double) { return 1.0; });

  auto h = HistoryAccumulator::zero(ns);
  advance(h, unit, Vec::Zero(ns), 0.1);
  CHECK(h.acc.cwiseAbs().maxCoeff() == 0.0);  // eta == 0 leaves history unchanged
  CHECK(h.t_now == doctest::Approx(0.1));

  // constant kernel weight and constant eta: growth dt * eta * |GammaC| per node
  const double eta_bar = 2.5, dt = 0.05;
  advance(h, unit, Vec::Constant(ns, eta_bar), dt);
  for (int k = 0; k < ns; ++k)
    CHECK(h.acc[k] == doctest::Approx(dt * eta_bar * 1.0).epsilon(1e-14));
}

TEST_CASE("accumulator equals dense re-summation") {
  Setup s;
  const int ns = s.forms.num_surface;
  const KernelMatrix kern = build_kernel(s.mesh, s.forms, 0.25);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> uni(0.0, 2.0);

  const double dt = 0.02;
  auto h = HistoryAccumulator::zero(ns);
  std::vector<Vec> etas;
  for (int n = 0; n < 40; ++n) {
    Vec eta(ns);
    for (int k = 0; k < ns; ++k) eta[k] = uni(rng);
    etas.push_back(eta);
    advance(h, kern, eta, dt);
  }
  Vec dense = Vec::Zero(ns);
  for (const auto& eta : etas) dense += dt * (kern.W * eta);
  CHECK((h.acc - dense).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("linearity of the history operator") {
  Setup s;
  const int ns = s.forms.num_surface;
  const KernelMatrix kern = build_kernel(s.mesh, s.forms, 0.25);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  auto ha = HistoryAccumulator::zero(ns), hb = HistoryAccumulator::zero(ns),
       hc = HistoryAccumulator::zero(ns);
  const double a = 1.7, b = -0.4, dt = 0.01;
  for (int n = 0; n < 25; ++n) {
    Vec e1(ns), e2(ns);
    for (int k = 0; k < ns; ++k) {
      e1[k] = uni(rng);
      e2[k] = uni(rng);
    }
    advance(ha, kern, e1, dt);
    advance(hb, kern, e2, dt);
    advance(hc, kern, Vec(a * e1 + b * e2), dt);
  }
  CHECK((Vec(a * ha.acc + b * hb.acc) - hc.acc).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("bound and equicontinuity of the history operator") {
  Setup s;
  const int ns = s.forms.num_surface;
  const KernelMatrix kern = build_kernel(s.mesh, s.forms, 0.25);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(0.0, 3.0);

  const double dt = 0.02;
  const int nsteps = 50;
  auto h = HistoryAccumulator::zero(ns);
  std::vector<Vec> acc_at;
  double eta_sq_time = 0.0;  // discrete L2(0,t;L2) norm accumulator
  std::vector<double> eta_sq_prefix{0.0};
  for (int n = 0; n < nsteps; ++n) {
    Vec eta(ns);
    for (int k = 0; k < ns; ++k) eta[k] = uni(rng);
    double nrm = 0.0;
    for (int k = 0; k < ns; ++k) nrm += s.forms.ms_lump[k] * eta[k] * eta[k];
    eta_sq_time += dt * nrm;
    eta_sq_prefix.push_back(eta_sq_time);
    advance(h, kern, eta, dt);
    acc_at.push_back(h.acc);

    // |R(x_i,t)| <= sqrt(t) ||l(x_i,.)|| ||eta||_{L2(0,t;L2)} with 1.05 slack
    const double t = (n + 1) * dt;
    const Vec R = eval_R_magnitude(h);
    for (int k = 0; k < ns; ++k)
      CHECK(R[k] <= 1.05 * std::sqrt(t) * kern.ell_norms[k] * std::sqrt(eta_sq_time) + 1e-14);
  }

  // equicontinuity || R(t) - R(s) || <= ||l|| sqrt(t-s) ||eta||_{L2(s,t;L2)}
  for (int a = 5; a < nsteps; a += 7) {
    for (int b = a + 3; b < nsteps; b += 11) {
      const double gap = (b - a) * dt;
      const double eta_piece = std::sqrt(eta_sq_prefix[b + 1] - eta_sq_prefix[a + 1]);
      const Vec diff = (acc_at[b] - acc_at[a]).cwiseAbs();
      for (int k = 0; k < ns; ++k)
        CHECK(diff[k] <= 1.05 * std::sqrt(gap) * kern.ell_norms[k] * eta_piece + 1e-14);
    }
  }
}

TEST_CASE("stability against input perturbations") {
  Setup s;
  const int ns = s.forms.num_surface;
  const KernelMatrix kern = build_kernel(s.mesh, s.forms, 0.25);
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> uni(0.0, 1.0), pert(-1.0, 1.0);

  const double dt = 0.02;
  auto h1 = HistoryAccumulator::zero(ns), h2 = HistoryAccumulator::zero(ns);
  double delta_sq = 0.0;
  for (int n = 0; n < 30; ++n) {
    Vec eta(ns), d(ns);
    for (int k = 0; k < ns; ++k) {
      eta[k] = uni(rng);
      d[k] = 1e-3 * pert(rng);
    }
    double nrm = 0.0;
    for (int k = 0; k < ns; ++k) nrm += s.forms.ms_lump[k] * d[k] * d[k];
    delta_sq += dt * nrm;
    advance(h1, kern, eta, dt);
    advance(h2, kern, Vec(eta + d), dt);
  }
  const double t = 30 * dt;
  const double C = std::sqrt(t) * kern.ell_norms.maxCoeff();
  CHECK((h1.acc - h2.acc).cwiseAbs().maxCoeff() <= 1.05 * C * std::sqrt(delta_sq));
}

TEST_CASE("R evaluation and direction") {
  Setup s;
  const int ns = s.forms.num_surface;
  const KernelMatrix kern = build_kernel(s.mesh, s.forms, 0.25);
  auto h = HistoryAccumulator::zero(ns);
  CHECK(eval_R_magnitude(h).cwiseAbs().maxCoeff() == 0.0);

  advance(h, kern, Vec::Constant(ns, 1.0), 0.1);
  const Mat R = eval_R(h, kern);
  const Vec mag = eval_R_magnitude(h);
  for (int k = 0; k < ns; ++k) {
    CHECK(R(k, 0) == doctest::Approx(h.acc[k] * kern.w_dir.x()));
    CHECK(R(k, 1) == doctest::Approx(h.acc[k] * kern.w_dir.y()));
    CHECK(mag[k] == doctest::Approx(std::abs(h.acc[k])));
  }
  CHECK_THROWS_AS(build_kernel(s.mesh, s.forms, 0.0), std::invalid_argument);
}
