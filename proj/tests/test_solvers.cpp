#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "oracle_monolithic.hpp"
#include "tac/solvers.hpp"

using namespace tac;

namespace {

RegularizationParams reg(double eps) {
  RegularizationParams p;
  p.eps = eps;
  return p;
}

Scenario still_scenario(double T = 1.0, double dt = 0.02) {
  Scenario s;
  s.name = "test";
  s.T_final = T;
  s.dt = dt;
  return s;
}

// benchmark-like data for small coupled tests
Scenario pressed_scenario(double f_down, double g_lat) {
  Scenario s = still_scenario();
  s.f = [f_down](double, const Vec2&) { return Vec2(0.0, -f_down); };
  s.g = [g_lat](double, const Vec2&) { return Vec2(g_lat, 0.0); };
  s.theta0 = [](const Vec2&) { return 0.8; };
  s.theta_s0 = [](double) { return 1.1; };
  s.chi0 = [](double) { return 0.9; };
  return s;
}

}  // namespace

TEST_CASE("momentum: zero data gives the zero solution") {
  Simulator sim(build_unit_square_mesh(4), MaterialModel::defaults(), reg(0.1));
  const int nn = sim.forms().num_nodes, ns = sim.forms().num_surface;
  const Scenario zero = still_scenario();
  auto mom = sim.momentum_step(Vec::Zero(2 * nn), Vec::Zero(nn), Vec::Zero(ns), Vec::Zero(ns),
                               Vec::Zero(ns), Vec::Zero(ns), 0.02, 0.02, zero);
  REQUIRE(mom.ok);
  CHECK(mom.u.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(mom.eta_n.cwiseAbs().maxCoeff() == 0.0);
  CHECK(mom.z.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("momentum: inactive contact reduces to the linear viscoelastic solve") {
  const Mesh mesh = build_unit_square_mesh(4);
  const MaterialModel mat = MaterialModel::defaults();
  Simulator sim(mesh, mat, reg(0.1));
  const auto& f = sim.forms();
  const int nn = f.num_nodes, ns = f.num_surface;

  // lift the body off the support: u_N < 0 everywhere, no friction history
  Scenario s = still_scenario();
  s.f = [](double, const Vec2&) { return Vec2(0.05, 0.2); };
  const double dt = 0.02;
  const Vec chi_hat = Vec::Constant(ns, 0.3);
  auto mom = sim.momentum_step(Vec::Zero(2 * nn), Vec::Zero(nn), Vec::Zero(ns), chi_hat,
                               Vec::Zero(ns), Vec::Zero(ns), dt, dt, s);
  REQUIRE(mom.ok);
  REQUIRE(f.normal_trace(mom.u).maxCoeff() < 0.0);

  // dense direct solve of (B/dt + A + lumped adhesive) u = F
  const int nf = static_cast<int>(f.free_dof.size());
  Mat S = Mat::Zero(nf, nf);
  for (int k = 0; k < f.a_form.outerSize(); ++k) {
    for (SpMat::InnerIterator it(f.a_form, k); it; ++it) {
      const int I = f.dof_to_free[it.row()], J = f.dof_to_free[it.col()];
      if (I >= 0 && J >= 0) S(I, J) += it.value();
    }
  }
  for (int k = 0; k < f.b_form.outerSize(); ++k) {
    for (SpMat::InnerIterator it(f.b_form, k); it; ++it) {
      const int I = f.dof_to_free[it.row()], J = f.dof_to_free[it.col()];
      if (I >= 0 && J >= 0) S(I, J) += it.value() / dt;
    }
  }
  for (int k = 0; k < ns; ++k) {
    const int i = f.surface_nodes[k];
    for (int c = 0; c < 2; ++c) {
      const int fd = f.dof_to_free[2 * i + c];
      if (fd >= 0) S(fd, fd) += f.ms_lump[k] * chi_hat[k];
    }
  }
  const Vec rhs = f.restrict_free(sim.F_load(dt, s));
  const Vec u_dense = f.extend_free(S.ldlt().solve(rhs));
  CHECK((mom.u - u_dense).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("momentum: Coulomb stick under a sub-threshold tangential load") {
  const Mesh mesh = build_unit_square_mesh(2);
  Simulator sim(mesh, MaterialModel::defaults(), reg(0.1));
  const auto& f = sim.forms();
  const int nn = f.num_nodes, ns = f.num_surface;

  // large frozen friction threshold, tiny lateral pull: every node sticks
  Scenario s = still_scenario();
  s.g = [](double, const Vec2&) { return Vec2(1e-3, 0.0); };
  const double dt = 0.02;
  auto mom = sim.momentum_step(Vec::Zero(2 * nn), Vec::Zero(nn), Vec::Zero(ns), Vec::Zero(ns),
                               Vec::Constant(ns, 50.0), Vec::Zero(ns), dt, dt, s);
  REQUIRE(mom.ok);
  const Vec udotT = f.tangential_trace(mom.u) / dt;
  CHECK(udotT.cwiseAbs().maxCoeff() <= 1e-10);        // second line of the dry friction law
  CHECK(mom.z.cwiseAbs().maxCoeff() < 1.0);           // interior multiplier
  CHECK(mom.z.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("adhesion: uniform state follows the scalar ODE") {
  const Mesh mesh = build_unit_square_mesh(4);
  MaterialModel mat = MaterialModel::defaults();
  mat.lambda_c = 0.0;
  mat.latent = [](double) { return 0.0; };
  mat.latent_deriv = [](double) { return 0.0; };
  const double eps = 0.1, w_s = 1.0, dt = 0.05;
  Simulator sim(mesh, mat, reg(eps));
  const int nn = sim.forms().num_nodes, ns = sim.forms().num_surface;

  // scalar implicit-Euler oracle by bisection on x + dt beta_eps(x) = c
  auto scalar_step = [&](double chi_old) {
    const double c = chi_old + dt * w_s;
    double lo = 0.0, hi = 3.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double val = mid + dt * beta_eps(mid, reg(eps));
      (val < c ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  Vec chi = Vec::Constant(ns, 0.4);
  double chi_scalar = 0.4;
  for (int n = 0; n < 200; ++n) {
    auto adh = sim.adhesion_step(chi, Vec::Zero(ns), Vec::Zero(2 * nn), dt);
    REQUIRE(adh.ok);
    chi = adh.chi;
    chi_scalar = scalar_step(chi_scalar);
    CHECK((chi.array() - chi_scalar).abs().maxCoeff() <= 1e-9);
    for (int k = 0; k < ns; ++k) CHECK(adh.xi[k] == beta_eps(chi[k], reg(eps)));
  }
  CHECK(chi[0] == doctest::Approx(1.0 + eps * w_s).epsilon(1e-6));
}

TEST_CASE("adhesion: zero cohesion is stationary") {
  const Mesh mesh = build_unit_square_mesh(4);
  MaterialModel mat = MaterialModel::defaults();
  mat.w_s = 0.0;
  mat.cohesion = [](double) { return 0.0; };
  mat.cohesion_deriv = [](double) { return 0.0; };
  mat.lambda_c = 0.0;
  mat.latent = [](double) { return 0.0; };
  mat.latent_deriv = [](double) { return 0.0; };
  Simulator sim(mesh, mat, reg(0.1));
  const int nn = sim.forms().num_nodes, ns = sim.forms().num_surface;
  const Vec chi0 = Vec::Constant(ns, 0.6);
  auto adh = sim.adhesion_step(chi0, Vec::Zero(ns), Vec::Zero(2 * nn), 0.05);
  REQUIRE(adh.ok);
  CHECK((adh.chi - chi0).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("adhesion: damage driven fastest where |u| is largest") {
  const Mesh mesh = build_unit_square_mesh(4);
  Simulator sim(mesh, MaterialModel::defaults(), reg(0.05));
  const auto& f = sim.forms();
  const int nn = f.num_nodes, ns = f.num_surface;
  Vec u = Vec::Zero(2 * nn);
  const int hot = f.surface_nodes[2];
  u[2 * hot] = 2.0;  // big trace at one node
  auto adh = sim.adhesion_step(Vec::Constant(ns, 0.9), Vec::Constant(ns, 1.0), u, 0.02);
  REQUIRE(adh.ok);
  for (int k = 0; k < ns; ++k) {
    if (k == 2) continue;
    CHECK(adh.chi[2] < adh.chi[k]);
  }
}

TEST_CASE("temperatures: constant state is stationary") {
  const Mesh mesh = build_unit_square_mesh(4);
  Simulator sim(mesh, MaterialModel::defaults(), reg(0.05));
  const int nn = sim.forms().num_nodes, ns = sim.forms().num_surface;
  const double c = 1.3, dt = 0.02;
  const Vec th = Vec::Constant(nn, c), ths = Vec::Constant(ns, c);
  const Vec u = Vec::Zero(2 * nn), chi = Vec::Constant(ns, 0.5);
  auto t = sim.thermal_step(th, ths, th, ths, u, u, chi, chi, Vec::Zero(ns), dt, dt,
                            still_scenario());
  REQUIRE(t.ok);
  CHECK((t.theta.array() - c).abs().maxCoeff() <= 1e-12);
  CHECK((t.theta_s.array() - c).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("temperatures: insulated mean growth is exactly dt * h") {
  const Mesh mesh = build_unit_square_mesh(4);
  MaterialModel mat = MaterialModel::defaults();
  mat.k0 = 0.0;
  mat.heat_exchange = [](double) { return 0.0; };  // no contact exchange
  const double eps = 0.05, dt = 0.02, hbar = 0.7;
  Simulator sim(mesh, mat, reg(eps));
  const int nn = sim.forms().num_nodes, ns = sim.forms().num_surface;
  Scenario s = still_scenario();
  s.h = [hbar](double, const Vec2&) { return hbar; };

  const Vec th0 = Vec::Constant(nn, 1.2), ths0 = Vec::Constant(ns, 1.2);
  const Vec u = Vec::Zero(2 * nn), chi = Vec::Constant(ns, 0.5);
  auto t =
      sim.thermal_step(th0, ths0, th0, ths0, u, u, chi, chi, Vec::Zero(ns), dt, dt, s);
  REQUIRE(t.ok);
  const auto& f = sim.forms();
  double mean_new = 0.0, mean_old = 0.0;
  for (int i = 0; i < nn; ++i) {
    mean_new += f.m_lump[i] * L_eps(t.theta[i], sim.reg());
    mean_old += f.m_lump[i] * L_eps(th0[i], sim.reg());
  }
  CHECK((mean_new - mean_old) / f.m_lump.sum() == doctest::Approx(dt * hbar).epsilon(1e-10));
}

TEST_CASE("temperatures: one step matches a dense Newton oracle") {
  const Mesh mesh = build_unit_square_mesh(2);
  Simulator sim(mesh, MaterialModel::defaults(), reg(0.08));
  const auto& f = sim.forms();
  const int nn = f.num_nodes, ns = f.num_surface;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(0.5, 2.0), small(-0.05, 0.05);

  Vec th0(nn), ths0(ns), chi_old(ns), chi_new(ns), R(ns);
  Vec u_new(2 * nn), u_prev(2 * nn);
  for (int i = 0; i < nn; ++i) th0[i] = uni(rng);
  for (int k = 0; k < ns; ++k) {
    ths0[k] = uni(rng);
    chi_old[k] = 0.3 + 0.2 * uni(rng);
    chi_new[k] = chi_old[k] - 0.01;
    R[k] = 0.2 * uni(rng);
  }
  for (int i = 0; i < 2 * nn; ++i) {
    u_prev[i] = small(rng);
    u_new[i] = u_prev[i] + small(rng) * 0.1;
  }
  const auto clamped = mesh.gamma1_node_mask();
  for (int i = 0; i < nn; ++i)
    if (clamped[i]) u_prev[2 * i] = u_prev[2 * i + 1] = u_new[2 * i] = u_new[2 * i + 1] = 0.0;

  Scenario s = still_scenario();
  s.h = [](double, const Vec2& x) { return 0.4 * x.x(); };
  const double dt = 0.02;
  auto t = sim.thermal_step(th0, ths0, th0, ths0, u_new, u_prev, chi_old, chi_new, R, dt, dt, s);
  REQUIRE(t.ok);

  // damped dense Newton on the same frozen-source discrete equation,
  // assembled independently here
  const auto& fr = sim.forms();
  const Vec udot = (u_new - u_prev) / dt;
  const Vec udotT_tr = fr.tangential_trace(udot);
  const Vec Fhat = sim.boundary_source(fr.surface_trace(th0), ths0, chi_new, R, udotT_tr);
  auto oracle_res = [&](const Vec& th_arg) {
    Vec r = fr.K_bulk * th_arg - fr.D * udot;
    for (int i = 0; i < nn; ++i) {
      r[i] += fr.m_lump[i] *
              ((L_eps(th_arg[i], sim.reg()) - L_eps(th0[i], sim.reg())) / dt -
               s.h(dt, mesh.nodes[i]));
    }
    for (int k = 0; k < ns; ++k) r[fr.surface_nodes[k]] += fr.ms_lump[k] * Fhat[k];
    return r;
  };
  Vec th = th0;
  for (int it = 0; it < 200; ++it) {
    const Vec r = oracle_res(th);
    const double rn = r.norm();
    if (rn <= 1e-14) break;
    Mat J(nn, nn);
    for (int j = 0; j < nn; ++j) {
      Vec tp = th;
      const double h = 1e-7 * (1.0 + std::abs(th[j]));
      tp[j] += h;
      J.col(j) = (oracle_res(tp) - r) / h;
    }
    const Vec dth = J.fullPivLu().solve(-r);
    double alpha = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      if (oracle_res(Vec(th + alpha * dth)).norm() < (1.0 - 1e-4 * alpha) * rn) {
        th += alpha * dth;
        break;
      }
      alpha *= 0.5;
    }
  }
  REQUIRE(oracle_res(th).norm() <= 1e-12);
  CHECK((t.theta - th).cwiseAbs().maxCoeff() <= 1e-9);

  // the two equations are decoupled: the surface solve ignores the bulk result
  auto t2 = sim.thermal_step(th0, ths0, th0, ths0, u_new, u_prev, chi_old, chi_new, R, dt, dt, s);
  CHECK((t2.theta_s - t.theta_s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coupled step: global equilibrium is a one-iteration fixed point") {
  const Mesh mesh = build_unit_square_mesh(2);
  MaterialModel mat = MaterialModel::defaults();
  mat.w_s = 0.0;
  mat.cohesion = [](double) { return 0.0; };
  mat.cohesion_deriv = [](double) { return 0.0; };
  mat.lambda_c = 0.0;
  mat.latent = [](double) { return 0.0; };
  mat.latent_deriv = [](double) { return 0.0; };
  Simulator sim(mesh, mat, reg(0.1));
  const int nn = sim.forms().num_nodes, ns = sim.forms().num_surface;

  State s;
  s.t = 0.0;
  s.theta = Vec::Zero(nn);
  s.theta_s = Vec::Zero(ns);
  s.u = Vec::Zero(2 * nn);
  s.u_prev = s.u;
  s.chi = Vec::Ones(ns);
  s.eta_n = Vec::Zero(ns);
  s.z = Vec::Zero(ns);
  s.mu = Vec::Zero(ns);
  s.xi = Vec::Zero(ns);
  s.hist = HistoryAccumulator::zero(ns);

  auto res = sim.coupled_step(s, 0.02, still_scenario());
  REQUIRE(res.ok);
  CHECK(res.report.outer_iters == 1);
  CHECK((res.state.theta - s.theta).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((res.state.u - s.u).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((res.state.chi - s.chi).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("coupled step equals the monolithic dense solve") {
  const Mesh mesh = build_unit_square_mesh(2);
  MaterialModel mat = MaterialModel::defaults();
  mat.w_s = 0.5;
  mat.cohesion_deriv = [](double) { return -0.5; };
  mat.cohesion = [](double x) { return 0.5 * (1.0 - x); };
  Simulator sim(mesh, mat, reg(0.08));
  Scenario scen = pressed_scenario(2.0, 0.4);
  scen.h = [](double, const Vec2& x) { return 0.5 * x.y(); };

  State s = sim.initial_state(scen);
  auto step1 = sim.coupled_step(s, 0.02, scen);
  REQUIRE(step1.ok);
  // penetration so the friction threshold is active in step 2
  REQUIRE(step1.state.eta_n.maxCoeff() > 0.0);
  REQUIRE(eval_R_magnitude(step1.state.hist).minCoeff() > 0.0);

  auto step2 = sim.coupled_step(step1.state, 0.02, scen);
  REQUIRE(step2.ok);

  tac_test::Monolithic oracle(sim, scen, step1.state, 0.02);
  const State ref = oracle.solve(1e-13);

  CHECK((step2.state.theta - ref.theta).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((step2.state.theta_s - ref.theta_s).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((step2.state.u - ref.u).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((step2.state.chi - ref.chi).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((step2.state.z - ref.z).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((step2.state.eta_n - ref.eta_n).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((step2.state.xi - ref.xi).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((step2.state.mu - ref.mu).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("coupled step: tighter outer tolerance barely moves the state") {
  const Mesh mesh = build_unit_square_mesh(2);
  SolverTols loose, tight;
  tight.outer = 0.5e-8;
  Simulator a(mesh, MaterialModel::defaults(), reg(0.08), loose);
  Simulator b(mesh, MaterialModel::defaults(), reg(0.08), tight);
  const Scenario scen = pressed_scenario(1.5, 0.3);
  State sa = a.initial_state(scen), sb = b.initial_state(scen);
  auto ra = a.coupled_step(sa, 0.02, scen);
  auto rb = b.coupled_step(sb, 0.02, scen);
  REQUIRE(ra.ok);
  REQUIRE(rb.ok);
  CHECK((ra.state.u - rb.state.u).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((ra.state.theta - rb.state.theta).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("friction structure along a short pressed run") {
  const Mesh mesh = build_unit_square_mesh(4);
  Simulator sim(mesh, MaterialModel::defaults(), reg(0.05));
  const Scenario scen = pressed_scenario(2.0, 0.4);
  RunResult run;
  {
    Scenario short_scen = scen;
    short_scen.T_final = 0.2;
    run = run_simulation(sim, short_scen);
  }
  REQUIRE(run.completed);
  const auto& f = sim.forms();
  for (size_t n = 1; n < run.trajectory.size(); ++n) {
    const State& s = run.trajectory[n];
    const Vec R = eval_R_magnitude(s.hist);
    const Vec udotT = f.tangential_trace(Vec(s.u - s.u_prev)) / s.dt_last;
    for (int k = 0; k < f.num_surface; ++k) {
      CHECK(std::abs(s.z[k]) <= 1.0 + 1e-12);
      CHECK(s.eta_n[k] >= 0.0);
      CHECK(s.mu[k] == R[k] * s.z[k]);                 // multiplier consistency
      CHECK(s.xi[k] == beta_eps(s.chi[k], sim.reg())); // exact selection
      CHECK(s.mu[k] * udotT[k] >= -1e-12);             // friction dissipates
      if (std::abs(udotT[k]) > sim.tols().slip_tol) CHECK(std::abs(s.z[k]) >= 1.0 - 1e-6);
    }
  }
}

TEST_CASE("symmetric-form chain rule identity for the elastic energy") {
  const Mesh mesh = build_unit_square_mesh(4);
  Simulator sim(mesh, MaterialModel::defaults(), reg(0.1));
  const auto& A = sim.forms().a_form;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vec u1(A.rows()), u2(A.rows());
    for (int i = 0; i < A.rows(); ++i) {
      u1[i] = uni(rng);
      u2[i] = uni(rng);
    }
    const double lhs = u2.dot(A * u2) - u1.dot(A * u1);
    const double rhs = Vec(u2 + u1).dot(A * Vec(u2 - u1));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("run_simulation: zero data stays constant") {
  const Mesh mesh = build_unit_square_mesh(2);
  MaterialModel mat = MaterialModel::defaults();
  mat.w_s = 0.0;
  mat.cohesion = [](double) { return 0.0; };
  mat.cohesion_deriv = [](double) { return 0.0; };
  mat.lambda_c = 0.0;
  mat.latent = [](double) { return 0.0; };
  mat.latent_deriv = [](double) { return 0.0; };
  Simulator sim(mesh, mat, reg(0.1));
  Scenario s = still_scenario(0.2, 0.02);
  s.theta0 = [](const Vec2&) { return 1e-100; };
  s.theta_s0 = [](double) { return 1e-100; };
  s.chi0 = [](double) { return 1.0; };
  const auto run = run_simulation(sim, s);
  REQUIRE(run.completed);
  for (const auto& st : run.trajectory) {
    CHECK(st.u.cwiseAbs().maxCoeff() <= 1e-50);
    CHECK((st.chi.array() - 1.0).abs().maxCoeff() <= 1e-50);
    CHECK(st.theta.cwiseAbs().maxCoeff() <= 1e-50);
  }
}

TEST_CASE("run_simulation rejects a non-integral grid") {
  Simulator sim(build_unit_square_mesh(2), MaterialModel::defaults(), reg(0.1));
  Scenario s = still_scenario(1.0, 0.3);
  const auto run = run_simulation(sim, s);
  CHECK(!run.completed);
}
