#include <cmath>

#include "doctest.h"
#include "pinnlab/fdsolve.hpp"

using namespace pinnlab;

namespace {
constexpr double kTrainX[4] = {-0.55, -0.3, 0.3, 0.8};

double mean_eps2_at_train_points(const FdSolution& s) {
  double acc = 0.0;
  for (double x : kTrainX) {
    const int idx = static_cast<int>(std::lround((x + 1.0) / s.mesh.dx));
    REQUIRE(s.mesh.nodes[idx] == doctest::Approx(x).epsilon(1e-13));
    const double eps = s.values[idx] - eval_mms(s.mesh.nodes[idx], Viscosity(s.nu));
    acc += eps * eps;
  }
  return acc / 4.0;
}
}  // namespace

TEST_CASE("build_mesh spacing and bounds") {
  const Mesh m = build_mesh(81);
  CHECK(m.dx == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(m.nodes.front() == -1.0);
  CHECK(m.nodes.back() == 1.0);
  for (int i = 0; i + 1 < m.n_nodes; ++i)
    CHECK(m.nodes[i + 1] - m.nodes[i] == doctest::Approx(m.dx).epsilon(1e-13));

  const Mesh tiny = build_mesh(5);
  CHECK(tiny.nodes[1] == doctest::Approx(-0.5));
  CHECK(tiny.nodes[2] == doctest::Approx(0.0));
  CHECK(tiny.nodes[3] == doctest::Approx(0.5));

  CHECK_THROWS_AS(build_mesh(4), std::invalid_argument);
}

TEST_CASE("residual vanishes for constant field with zero source") {
  const Mesh m = build_mesh(41);
  std::vector<double> u(m.n_nodes, 3.7), zero_src(m.n_nodes, 0.0);
  const auto r = spatial_residual(u, m, Viscosity(1e-2), zero_src);
  for (double v : r) CHECK(v == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("linear field: convection is exact, diffusion vanishes") {
  const Mesh m = build_mesh(33);
  std::vector<double> u(m.nodes.begin(), m.nodes.end()), zero_src(m.n_nodes, 0.0);
  const auto r = spatial_residual(u, m, Viscosity(5e-2), zero_src);
  for (int i = 2; i < m.n_nodes - 1; ++i)
    CHECK(r[i] == doctest::Approx(m.nodes[i]).epsilon(1e-11));
}

TEST_CASE("truncation residual of the manufactured field shrinks ~4x per mesh doubling") {
  const Viscosity nu(1e-2);
  double prev = 0.0;
  std::vector<double> maxr;
  for (int n : {1001, 2001}) {
    const Mesh m = build_mesh(n);
    std::vector<double> u(m.n_nodes);
    for (int i = 0; i < m.n_nodes; ++i) u[i] = eval_mms(m.nodes[i], nu);
    const auto r = spatial_residual(u, m, nu);
    double mx = 0.0;
    for (double v : r) mx = std::max(mx, std::abs(v));
    CHECK(mx > 0.0);
    maxr.push_back(mx);
  }
  const double shrink = maxr[0] / maxr[1];
  CHECK(shrink > 3.2);
  CHECK(shrink < 4.8);
}

TEST_CASE("steady solve reproduces the coarse-mesh label-error level") {
  const Mesh m = build_mesh(81);
  const auto sol = solve_steady(m, Viscosity(1e-2));
  CHECK(sol.values[0] == eval_mms(-1.0, Viscosity(1e-2)));  // bit-exact Dirichlet
  CHECK(mean_eps2_at_train_points(sol) == doctest::Approx(8.4348e-2).epsilon(1e-3));
}

TEST_CASE("steady solve on the medium mesh") {
  const Mesh m = build_mesh(641);
  const auto sol = solve_steady(m, Viscosity(1e-2));
  CHECK(mean_eps2_at_train_points(sol) == doctest::Approx(2.7927e-6).epsilon(1e-3));
  double rmse = 0.0;
  for (int i = 0; i < m.n_nodes; ++i) {
    const double e = sol.values[i] - eval_mms(m.nodes[i], Viscosity(1e-2));
    rmse += e * e;
  }
  rmse = std::sqrt(rmse / m.n_nodes);
  CHECK(rmse == doctest::Approx(1.887e-3).epsilon(2e-3));
}

TEST_CASE("steady state is independent of the pseudo-time step") {
  const Mesh m = build_mesh(81);
  SolveOptions a, b;
  a.cfl = 0.2;
  b.cfl = 0.4;
  a.tol = b.tol = 1e-10;
  const auto sa = solve_steady(m, Viscosity(1e-2), a);
  const auto sb = solve_steady(m, Viscosity(1e-2), b);
  for (int i = 0; i < m.n_nodes; ++i)
    CHECK(std::abs(sa.values[i] - sb.values[i]) < 10 * a.tol);
}

TEST_CASE("grid convergence order near two") {
  const Viscosity nu(1e-2);
  double err[2];
  int k = 0;
  for (int n : {161, 321}) {
    const auto sol = solve_steady(build_mesh(n), nu);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = sol.values[i] - eval_mms(sol.mesh.nodes[i], nu);
      acc += e * e;
    }
    err[k++] = std::sqrt(acc / n);
  }
  const double order = std::log(err[0] / err[1]) / std::log(2.0);
  CHECK(order > 1.8);
  CHECK(order < 3.0);
}

TEST_CASE("one further sweep moves a converged state by at most dt*tol") {
  const Mesh m = build_mesh(81);
  SolveOptions opts;
  opts.tol = 1e-8;
  const auto sol = solve_steady(m, Viscosity(1e-2), opts);
  REQUIRE(sol.status == SolveStatus::converged);
  REQUIRE(sol.final_residual < opts.tol);

  // replicate one pseudo-time sweep with the solver's stage coefficients
  const double bc = eval_mms(-1.0, Viscosity(1e-2));
  double umax = 0.0;
  for (double v : sol.values) umax = std::max(umax, std::abs(v));
  const double dt =
      opts.cfl * std::min(m.dx / umax, m.dx * m.dx / (2.0 * 1e-2));
  std::vector<double> u = sol.values, stage = sol.values;
  const double alphas[4] = {0.25, 1.0 / 3.0, 0.5, 1.0};
  for (double a : alphas) {
    const auto r = spatial_residual(stage, m, Viscosity(1e-2));
    for (int i = 1; i < m.n_nodes; ++i) stage[i] = u[i] - a * dt * r[i];
    stage[0] = bc;
  }
  double move = 0.0;
  for (int i = 0; i < m.n_nodes; ++i) move = std::max(move, std::abs(stage[i] - u[i]));
  CHECK(move <= dt * opts.tol * 1.01);
}

TEST_CASE("label errors vanish at the pinned inflow node") {
  const auto sol = solve_steady(build_mesh(81), Viscosity(1e-2));
  const auto errs = label_errors(sol);
  CHECK(errs.front().epsilon == 0.0);
  CHECK(errs.front().location == -1.0);
  CHECK(errs.size() == 81);
}

TEST_CASE("iteration cap raises NonConvergence") {
  SolveOptions opts;
  opts.max_iters = 5;
  CHECK_THROWS_AS(solve_steady(build_mesh(81), Viscosity(1e-2), opts),
                  NonConvergenceError);
}

TEST_CASE("cfl and tol preconditions") {
  CHECK_THROWS_AS(solve_steady(build_mesh(11), Viscosity(1e-2), SolveOptions{.cfl = 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_steady(build_mesh(11), Viscosity(1e-2), SolveOptions{.cfl = 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      solve_steady(build_mesh(11), Viscosity(1e-2), SolveOptions{.tol = 0.0}),
      std::invalid_argument);
}
