#include <cmath>
#include <random>

#include "doctest.h"
#include "pinnlab/optim.hpp"
#include "pinnlab/tapenet.hpp"

using namespace pinnlab;

TEST_CASE("AdamW drives a scalar quadratic below 1e-4 and matches the scalar oracle") {
  // oracle: the same recursion in plain doubles
  double om = 0.0, ov = 0.0, otheta = 1.0;
  const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  AdamWOptions opts;
  opts.lr = lr;
  opts.weight_decay = 0.0;
  AdamW adam(1, opts);
  Eigen::VectorXd theta = Eigen::VectorXd::Ones(1);
  for (int t = 1; t <= 1000; ++t) {
    const double g = 2.0 * otheta;
    om = b1 * om + (1 - b1) * g;
    ov = b2 * ov + (1 - b2) * g * g;
    otheta -= lr * (om / (1 - std::pow(b1, t))) /
              (std::sqrt(ov / (1 - std::pow(b2, t))) + eps);

    Eigen::VectorXd grad(1);
    grad[0] = 2.0 * theta[0];
    adam.step(theta, grad);
  }
  CHECK(std::abs(theta[0]) < 1e-4);
  CHECK(theta[0] == doctest::Approx(otheta).epsilon(1e-12));
}

TEST_CASE("AdamW: zero gradient leaves parameters in place (wd=0)") {
  AdamWOptions opts;
  opts.weight_decay = 0.0;
  AdamW adam(3, opts);
  Eigen::VectorXd theta(3);
  theta << 1.0, -2.0, 0.5;
  const Eigen::VectorXd before = theta;
  adam.step(theta, Eigen::VectorXd::Zero(3));
  CHECK(theta == before);
}

TEST_CASE("AdamW: zero gradient with decay shrinks multiplicatively") {
  AdamWOptions opts;
  opts.lr = 0.01;
  opts.weight_decay = 0.1;
  AdamW adam(2, opts);
  Eigen::VectorXd theta(2);
  theta << 4.0, -8.0;
  const double factor = 1.0 - opts.lr * opts.weight_decay;
  adam.step(theta, Eigen::VectorXd::Zero(2));
  CHECK(theta[0] == doctest::Approx(4.0 * factor).epsilon(1e-15));
  CHECK(theta[1] == doctest::Approx(-8.0 * factor).epsilon(1e-15));
  adam.step(theta, Eigen::VectorXd::Zero(2));
  CHECK(theta[0] == doctest::Approx(4.0 * factor * factor).epsilon(1e-15));
}

TEST_CASE("AdamW decay mask exempts chosen entries") {
  AdamWOptions opts;
  opts.lr = 0.01;
  opts.weight_decay = 0.1;
  AdamW adam(2, opts);
  Eigen::VectorXd mask(2);
  mask << 1.0, 0.0;
  adam.set_decay_mask(mask);
  Eigen::VectorXd theta(2);
  theta << 1.0, 1.0;
  adam.step(theta, Eigen::VectorXd::Zero(2));
  CHECK(theta[0] < 1.0);
  CHECK(theta[1] == 1.0);
}

TEST_CASE("AdamW rejects non-finite gradients") {
  AdamW adam(2, {});
  Eigen::VectorXd theta = Eigen::VectorXd::Ones(2);
  Eigen::VectorXd grad(2);
  grad << 1.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(adam.step(theta, grad), NumericFault);
}

namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
  const double a = x[0], b = x[1];
  g.resize(2);
  g[0] = -2.0 * (1 - a) - 400.0 * a * (b - a * a);
  g[1] = 200.0 * (b - a * a);
  return (1 - a) * (1 - a) + 100.0 * (b - a * a) * (b - a * a);
}

}  // namespace

TEST_CASE("L-BFGS solves Rosenbrock from (-1.2, 1) within 100 iterations") {
  Eigen::VectorXd x(2);
  x << -1.2, 1.0;
  Lbfgs opt(2, {});
  int used = 0;
  for (; used < 100; ++used) {
    const auto status = opt.step(x, rosenbrock);
    REQUIRE(status != LbfgsStepStatus::failed);
    if ((x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 1.0) * (x[1] - 1.0) < 1e-16) break;
  }
  CHECK(std::abs(x[0] - 1.0) < 1e-8);
  CHECK(std::abs(x[1] - 1.0) < 1e-8);
  CHECK(used < 100);
}

TEST_CASE("L-BFGS reaches 1e-10 gradient norm on a 10-d convex quadratic in 30 iters") {
  const int d = 10;
  Eigen::VectorXd diag(d), shift(d);
  for (int i = 0; i < d; ++i) {
    diag[i] = 1.0 + i * 3.0;
    shift[i] = std::sin(1.0 + i);
  }
  const LossGradFn fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = diag.cwiseProduct(x - shift);
    return 0.5 * (x - shift).dot(g);
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  Lbfgs opt(d, {});
  bool done = false;
  for (int it = 0; it < 30 && !done; ++it) {
    opt.step(x, fg);
    done = opt.current_grad().norm() < 1e-10;
  }
  CHECK(done);
}

TEST_CASE("L-BFGS: zero gradient at start moves nothing and stores no pair") {
  const LossGradFn fg = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = Eigen::VectorXd::Zero(x.size());
    return 1.0;
  };
  Eigen::VectorXd x(3);
  x << 1.0, 2.0, 3.0;
  const Eigen::VectorXd before = x;
  Lbfgs opt(3, {});
  const auto status = opt.step(x, fg);
  CHECK(status == LbfgsStepStatus::failed);
  CHECK(x == before);
  CHECK(opt.history_size() == 0);
}

TEST_CASE("L-BFGS directions are descent directions and accepted steps decrease f") {
  std::mt19937_64 rng(5);
  const int d = 6;
  Eigen::MatrixXd A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = ((rng() >> 11) * 0x1p-53) - 0.5;
  const Eigen::MatrixXd H = A.transpose() * A + Eigen::MatrixXd::Identity(d, d);
  const LossGradFn fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = H * x;
    const double quad = 0.5 * x.dot(g);
    const double bump = std::cos(x.sum());
    g.array() -= std::sin(x.sum());
    return quad + bump;
  };
  Eigen::VectorXd x = Eigen::VectorXd::Constant(d, 1.3);
  Lbfgs opt(d, {});
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 25; ++it) {
    const auto status = opt.step(x, fg);
    if (status == LbfgsStepStatus::failed) break;
    CHECK(opt.last_directional_derivative() < 0.0);
    if (status == LbfgsStepStatus::accepted) {
      CHECK(opt.current_loss() <= prev + 1e-12);
    }
    prev = opt.current_loss();
  }
  CHECK(opt.current_grad().norm() < 1e-6);
}
