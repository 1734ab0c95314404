#include "pinnlab/tapenet.hpp"

#include <cmath>
#include <random>

namespace pinnlab {

std::int64_t NetParams::param_count() const {
  std::int64_t n = 0;
  for (size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

NetParams init_params(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("init_params: need at least input and output layer");
  for (int s : layer_sizes)
    if (s < 1) throw std::invalid_argument("init_params: layer sizes must be >= 1");

  std::mt19937_64 rng(seed);
  const auto unit = [&rng] { return (rng() >> 11) * 0x1p-53; };  // [0,1)

  NetParams p;
  p.layer_sizes = layer_sizes;
  for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int nin = layer_sizes[l], nout = layer_sizes[l + 1];
    const double lim = std::sqrt(6.0 / (nin + nout));
    Eigen::MatrixXd w(nin, nout);
    for (int j = 0; j < nout; ++j)
      for (int i = 0; i < nin; ++i) w(i, j) = lim * (2.0 * unit() - 1.0);
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(nout));
  }
  return p;
}

Eigen::VectorXd flatten_params(const NetParams& p) {
  Eigen::VectorXd theta(p.param_count());
  Eigen::Index k = 0;
  for (int l = 0; l < p.layer_count(); ++l) {
    const auto& w = p.weights[l];
    theta.segment(k, w.size()) = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
    k += w.size();
    theta.segment(k, p.biases[l].size()) = p.biases[l];
    k += p.biases[l].size();
  }
  return theta;
}

void unflatten_params(const Eigen::VectorXd& theta, NetParams& out) {
  if (out.weights.empty()) {
    for (size_t l = 0; l + 1 < out.layer_sizes.size(); ++l) {
      out.weights.emplace_back(out.layer_sizes[l], out.layer_sizes[l + 1]);
      out.biases.emplace_back(out.layer_sizes[l + 1]);
    }
  }
  if (theta.size() != out.param_count())
    throw std::invalid_argument("unflatten_params: size mismatch");
  Eigen::Index k = 0;
  for (size_t l = 0; l < out.weights.size(); ++l) {
    auto& w = out.weights[l];
    Eigen::Map<Eigen::VectorXd>(w.data(), w.size()) = theta.segment(k, w.size());
    k += w.size();
    out.biases[l] = theta.segment(k, out.biases[l].size());
    k += out.biases[l].size();
  }
}

void JetTape::forward(const NetParams& p, const Eigen::MatrixXd& X) {
  if (X.cols() != p.input_dim())
    throw std::invalid_argument("JetTape::forward: input dimension mismatch");
  const int L = p.layer_count();
  const Eigen::Index B = X.rows();
  X_ = X;
  t_.assign(L - 1, {});
  zx_.assign(L - 1, {});
  zxx_.assign(L - 1, {});

  Eigen::MatrixXd a = X;
  Eigen::MatrixXd ax = Eigen::MatrixXd::Zero(B, X.cols());
  ax.col(0).setOnes();
  Eigen::MatrixXd axx = Eigen::MatrixXd::Zero(B, X.cols());

  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXd z = (a * p.weights[l]).rowwise() + p.biases[l].transpose();
    Eigen::MatrixXd zx = ax * p.weights[l];
    Eigen::MatrixXd zxx = axx * p.weights[l];
    if (l == L - 1) {
      u_ = z.col(0);
      ux_ = zx.col(0);
      uxx_ = zxx.col(0);
      return;
    }
    Eigen::MatrixXd t = z.array().tanh().matrix();
    const auto s = (1.0 - t.array().square());
    a = t;
    ax = (s * zx.array()).matrix();
    axx = (s * zxx.array() - 2.0 * t.array() * s * zx.array().square()).matrix();
    t_[l] = std::move(t);
    zx_[l] = std::move(zx);
    zxx_[l] = std::move(zxx);
  }
}

void JetTape::backward(const NetParams& p, const Eigen::VectorXd& u_bar,
                       const Eigen::VectorXd& ux_bar, const Eigen::VectorXd& uxx_bar,
                       Eigen::Ref<Eigen::VectorXd> grad) const {
  const int L = p.layer_count();
  const Eigen::Index B = X_.rows();
  if (grad.size() != p.param_count())
    throw std::invalid_argument("JetTape::backward: gradient size mismatch");

  // Adjoints with respect to the current layer's pre-activation jet.
  Eigen::MatrixXd zb = u_bar, zxb = ux_bar, zxxb = uxx_bar;

  // Offsets of each layer's block in the flat layout.
  std::vector<Eigen::Index> offset(L);
  {
    Eigen::Index k = 0;
    for (int l = 0; l < L; ++l) {
      offset[l] = k;
      k += p.weights[l].size() + p.biases[l].size();
    }
  }

  for (int l = L - 1; l >= 0; --l) {
    // Input jet of this layer, recomputed elementwise from the stored tape.
    Eigen::MatrixXd a_in, ax_in, axx_in;
    if (l == 0) {
      a_in = X_;
      ax_in = Eigen::MatrixXd::Zero(B, X_.cols());
      ax_in.col(0).setOnes();
      axx_in = Eigen::MatrixXd::Zero(B, X_.cols());
    } else {
      const auto& t = t_[l - 1];
      const auto& zx = zx_[l - 1];
      const auto& zxx = zxx_[l - 1];
      const auto s = (1.0 - t.array().square());
      a_in = t;
      ax_in = (s * zx.array()).matrix();
      axx_in = (s * zxx.array() - 2.0 * t.array() * s * zx.array().square()).matrix();
    }

    const auto& w = p.weights[l];
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + offset[l], w.rows(), w.cols());
    gw.noalias() += a_in.transpose() * zb;
    gw.noalias() += ax_in.transpose() * zxb;
    gw.noalias() += axx_in.transpose() * zxxb;
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offset[l] + w.size(), w.cols());
    gb.noalias() += zb.colwise().sum().transpose();

    if (l == 0) break;

    // Adjoint wrt this layer's input jet (= previous layer's output jet).
    Eigen::MatrixXd ab = zb * w.transpose();
    Eigen::MatrixXd axb = zxb * w.transpose();
    Eigen::MatrixXd axxb = zxxb * w.transpose();

    // Reverse of the tanh jet map of layer l-1.
    const auto& t = t_[l - 1];
    const auto& zx = zx_[l - 1];
    const auto& zxx = zxx_[l - 1];
    const auto ta = t.array();
    const auto s = (1.0 - ta.square());
    zb = (ab.array() * s - axb.array() * (2.0 * ta * s * zx.array()) +
          axxb.array() * (-2.0 * ta * s * zxx.array() - 2.0 * s.square() * zx.array().square() +
                          4.0 * ta.square() * s * zx.array().square()))
             .matrix();
    zxb = (axb.array() * s - axxb.array() * (4.0 * ta * s * zx.array())).matrix();
    zxxb = (axxb.array() * s).matrix();
  }
}

namespace {
JetEval jet_single(const NetParams& p, std::span<const double> inputs) {
  if (static_cast<int>(inputs.size()) != p.input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");
  Eigen::MatrixXd X(1, inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) X(0, i) = inputs[i];
  JetTape tape;
  tape.forward(p, X);
  return {tape.u()(0), tape.u_x()(0), tape.u_xx()(0)};
}
}  // namespace

double forward(const NetParams& p, std::span<const double> inputs) {
  return jet_single(p, inputs).u;
}

JetEval forward_jet(const NetParams& p, std::span<const double> inputs) {
  return jet_single(p, inputs);
}

void check_finite(const Eigen::VectorXd& v, const char* context) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw NumericFault(std::string(context) + ": non-finite value at index " +
                             std::to_string(i),
                         i);
}

}  // namespace pinnlab
