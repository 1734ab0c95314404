#include <cmath>
#include <random>

#include "doctest.h"
#include "pinnlab/tapenet.hpp"

using namespace pinnlab;

namespace {

Eigen::MatrixXd random_batch(int n, int dim, std::mt19937_64& rng) {
  Eigen::MatrixXd X(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) X(i, j) = 2.0 * ((rng() >> 11) * 0x1p-53) - 1.0;
  return X;
}

// Scalar test functional with all three adjoint paths active:
//   L = sum_i (a*u_i + b*u_i' + c*u_i'')^2
double functional(const NetParams& p, const Eigen::MatrixXd& X, double a, double b,
                  double c, Eigen::VectorXd* grad = nullptr) {
  JetTape tape;
  tape.forward(p, X);
  const Eigen::VectorXd w =
      a * tape.u() + b * tape.u_x() + c * tape.u_xx();
  if (grad != nullptr) {
    grad->setZero(p.param_count());
    tape.backward(p, 2.0 * a * w, 2.0 * b * w, 2.0 * c * w, *grad);
  }
  return w.squaredNorm();
}

}  // namespace

TEST_CASE("hand-built single-unit net evaluates tanh with exact jet") {
  NetParams p;
  p.layer_sizes = {1, 1, 1};
  p.weights = {Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1)};
  p.biases = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};

  const double xs[] = {0.0, 0.3, -0.7};
  for (double x : xs) {
    const JetEval j = forward_jet(p, {&x, 1});
    const double t = std::tanh(x), s = 1 - t * t;
    CHECK(j.u == doctest::Approx(t).epsilon(1e-15));
    CHECK(j.u_x == doctest::Approx(s).epsilon(1e-14));
    CHECK(j.u_xx == doctest::Approx(-2 * t * s).epsilon(1e-13));
  }
  const double zero = 0.0;
  const JetEval j0 = forward_jet(p, {&zero, 1});
  CHECK(j0.u == 0.0);
  CHECK(j0.u_x == 1.0);
  CHECK(j0.u_xx == 0.0);
}

TEST_CASE("zero-weight net returns the output bias everywhere") {
  NetParams p = init_params({2, 8, 1}, 3);
  for (auto& w : p.weights) w.setZero();
  p.biases.back()[0] = 2.5;
  const double in[2] = {0.4, -0.9};
  CHECK(forward(p, in) == 2.5);
  const JetEval j = forward_jet(p, in);
  CHECK(j.u == 2.5);
  CHECK(j.u_x == 0.0);
  CHECK(j.u_xx == 0.0);
}

TEST_CASE("forward is deterministic and identical to the jet value path") {
  NetParams p = init_params({1, 16, 16, 1}, 11);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const double x = 2.0 * ((rng() >> 11) * 0x1p-53) - 1.0;
    const double f1 = forward(p, {&x, 1});
    const double f2 = forward(p, {&x, 1});
    CHECK(f1 == f2);                       // repeatable bit-exactly
    CHECK(forward_jet(p, {&x, 1}).u == f1);  // jet value equals forward
  }
}

TEST_CASE("init_params is seeded, bounded, and layered correctly") {
  const NetParams a = init_params({2, 64, 64, 1}, 77);
  const NetParams b = init_params({2, 64, 64, 1}, 77);
  const NetParams c = init_params({2, 64, 64, 1}, 78);
  CHECK(flatten_params(a) == flatten_params(b));
  CHECK(flatten_params(a) != flatten_params(c));
  CHECK(a.param_count() == 2 * 64 + 64 + 64 * 64 + 64 + 64 + 1);
  for (size_t l = 0; l < a.weights.size(); ++l) {
    const double lim =
        std::sqrt(6.0 / (a.weights[l].rows() + a.weights[l].cols()));
    CHECK(a.weights[l].cwiseAbs().maxCoeff() <= lim);
    CHECK(a.biases[l].cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("flatten/unflatten round trip") {
  const NetParams p = init_params({2, 5, 3, 1}, 9);
  const Eigen::VectorXd theta = flatten_params(p);
  NetParams q;
  q.layer_sizes = p.layer_sizes;
  unflatten_params(theta, q);
  CHECK(flatten_params(q) == theta);
  for (size_t l = 0; l < p.weights.size(); ++l) {
    CHECK(q.weights[l] == p.weights[l]);
    CHECK(q.biases[l] == p.biases[l]);
  }
}

TEST_CASE("jets match central finite differences on random nets") {
  std::mt19937_64 rng(123);
  const double h = 1e-4;
  for (int trial = 0; trial < 25; ++trial) {
    const int dim = trial % 2 == 0 ? 1 : 2;
    const NetParams p = init_params({dim, 12, 12, 1}, 1000 + trial);
    for (int k = 0; k < 4; ++k) {
      double in[2] = {1.6 * ((rng() >> 11) * 0x1p-53) - 0.8,
                      2.0 * ((rng() >> 11) * 0x1p-53) - 1.0};
      const JetEval j = forward_jet(p, {in, static_cast<size_t>(dim)});
      double ip[2] = {in[0] + h, in[1]}, im[2] = {in[0] - h, in[1]};
      const double up = forward(p, {ip, static_cast<size_t>(dim)});
      const double um = forward(p, {im, static_cast<size_t>(dim)});
      const double u0 = forward(p, {in, static_cast<size_t>(dim)});
      const double fd1 = (up - um) / (2 * h);
      const double fd2 = (up - 2 * u0 + um) / (h * h);
      CHECK(std::abs(j.u_x - fd1) / std::max(1e-3, std::abs(fd1)) < 1e-5);
      CHECK(std::abs(j.u_xx - fd2) / std::max(1e-2, std::abs(fd2)) < 1e-4);
    }
  }
}

TEST_CASE("parametric jet differentiates along x only") {
  const NetParams p = init_params({2, 10, 10, 1}, 5);
  const double h = 1e-5;
  double in[2] = {0.3, 0.25};
  const JetEval j = forward_jet(p, in);
  // moving the second input changes u but u_x tracks the x-derivative there
  double in2[2] = {0.3, 0.25 + 0.1};
  const JetEval j2 = forward_jet(p, in2);
  CHECK(j2.u != j.u);
  double ip[2] = {0.3 + h, 0.25 + 0.1}, im[2] = {0.3 - h, 0.25 + 0.1};
  const double fd = (forward(p, ip) - forward(p, im)) / (2 * h);
  CHECK(j2.u_x == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("parameter gradient matches finite differences through all jet paths") {
  std::mt19937_64 rng(321);
  for (int trial = 0; trial < 6; ++trial) {
    const int dim = trial % 2 == 0 ? 1 : 2;
    NetParams p = init_params({dim, 6, 6, 1}, 50 + trial);
    const Eigen::MatrixXd X = random_batch(5, dim, rng);
    const double a = 0.7, b = -0.4, c = 0.15;

    Eigen::VectorXd grad;
    functional(p, X, a, b, c, &grad);

    Eigen::VectorXd theta = flatten_params(p);
    const double h = 1e-6;
    double max_rel = 0.0;
    const double scale = std::max(1.0, grad.norm());
    NetParams q;
    q.layer_sizes = p.layer_sizes;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Eigen::VectorXd tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      unflatten_params(tp, q);
      const double fp = functional(q, X, a, b, c);
      unflatten_params(tm, q);
      const double fm = functional(q, X, a, b, c);
      const double fd = (fp - fm) / (2 * h);
      max_rel = std::max(max_rel, std::abs(grad[i] - fd) / scale);
    }
    CHECK(max_rel < 1e-4);
  }
}

TEST_CASE("dead unit receives an exactly zero gradient") {
  NetParams p = init_params({1, 4, 1}, 6);
  p.weights[1](2, 0) = 0.0;  // unit 2 disconnected from the output
  Eigen::MatrixXd X(3, 1);
  X << -0.5, 0.1, 0.8;
  Eigen::VectorXd grad;
  functional(p, X, 1.0, 0.5, 0.2, &grad);
  // incoming weight and bias of unit 2 sit at flat positions: W0 is 1x4
  // column-major, bias follows
  CHECK(grad[2] == 0.0);      // W0(0,2)
  CHECK(grad[4 + 2] == 0.0);  // b0(2)
}

TEST_CASE("loss u(x0)^2 on a zero net puts gradient 2b on the output bias only") {
  NetParams p = init_params({1, 8, 1}, 321);
  for (auto& w : p.weights) w.setZero();
  const double bias = 1.7;
  p.biases.back()[0] = bias;
  Eigen::MatrixXd X(1, 1);
  X << 0.3;
  Eigen::VectorXd grad;
  functional(p, X, 1.0, 0.0, 0.0, &grad);  // L = u^2
  for (Eigen::Index i = 0; i + 1 < grad.size(); ++i) CHECK(grad[i] == 0.0);
  CHECK(grad[grad.size() - 1] == doctest::Approx(2.0 * bias).epsilon(1e-15));
}

TEST_CASE("gradient is linear in the loss") {
  std::mt19937_64 rng(8);
  NetParams p = init_params({1, 10, 10, 1}, 99);
  const Eigen::MatrixXd X = random_batch(7, 1, rng);
  Eigen::VectorXd g1, g2;
  functional(p, X, 1.0, 0.0, 0.0, &g1);
  functional(p, X, 0.0, 1.0, 0.3, &g2);

  // combined scalar 2.5*L1 + 0.5*L2 via stacked adjoints
  JetTape tape;
  tape.forward(p, X);
  const Eigen::VectorXd w1 = tape.u();
  const Eigen::VectorXd w2 = tape.u_x() + 0.3 * tape.u_xx();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p.param_count());
  tape.backward(p, 2.5 * 2.0 * w1, Eigen::VectorXd::Zero(7), Eigen::VectorXd::Zero(7), g);
  tape.backward(p, Eigen::VectorXd::Zero(7), 0.5 * 2.0 * w2, 0.5 * 2.0 * 0.3 * w2, g);

  const Eigen::VectorXd want = 2.5 * g1 + 0.5 * g2;
  CHECK((g - want).norm() <= 1e-12 * want.norm());
}

TEST_CASE("dimension mismatches are rejected") {
  const NetParams p = init_params({2, 4, 1}, 1);
  const double x = 0.5;
  CHECK_THROWS_AS((void)forward(p, {&x, 1}), std::invalid_argument);
  JetTape tape;
  CHECK_THROWS_AS(tape.forward(p, Eigen::MatrixXd::Zero(3, 1)), std::invalid_argument);
}

TEST_CASE("check_finite reports the offending index") {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(5);
  v[3] = std::nan("");
  try {
    check_finite(v, "test");
    FAIL("expected NumericFault");
  } catch (const NumericFault& f) {
    CHECK(f.index == 3);
  }
}
