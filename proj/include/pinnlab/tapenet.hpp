#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinnlab {

/// Non-finite value escaped a numeric kernel; index is the offending slot in
/// the flat parameter/gradient layout (-1 when unknown).
struct NumericFault : std::runtime_error {
  std::ptrdiff_t index;
  NumericFault(const std::string& what, std::ptrdiff_t idx = -1)
      : std::runtime_error(what), index(idx) {}
};

/// Network output jet with respect to the spatial input (column 0): value,
/// first and second x-derivative.
struct JetEval {
  double u;
  double u_x;
  double u_xx;
};

/// Fully connected tanh network. weights[l] is (n_in x n_out); hidden layers
/// apply tanh, the output layer is affine.
struct NetParams {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  int input_dim() const { return layer_sizes.front(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
  std::int64_t param_count() const;
};

/// Glorot-uniform weights, zero biases; bit-reproducible for a given seed.
NetParams init_params(const std::vector<int>& layer_sizes, std::uint64_t seed);

/// Flat layout: per layer, weight matrix in column-major order, then biases.
Eigen::VectorXd flatten_params(const NetParams& p);
/// Inverse of flatten_params; out.layer_sizes determines the shapes.
void unflatten_params(const Eigen::VectorXd& theta, NetParams& out);

double forward(const NetParams& p, std::span<const double> inputs);
JetEval forward_jet(const NetParams& p, std::span<const double> inputs);

/// Batched jet evaluation that records the intermediates needed to run the
/// exact reverse pass through (u, u_x, u_xx). One row of X per point; the
/// derivative direction is input column 0.
class JetTape {
 public:
  void forward(const NetParams& p, const Eigen::MatrixXd& X);

  const Eigen::VectorXd& u() const { return u_; }
  const Eigen::VectorXd& u_x() const { return ux_; }
  const Eigen::VectorXd& u_xx() const { return uxx_; }
  Eigen::Index batch() const { return X_.rows(); }

  /// Accumulates into grad the derivative of a scalar with per-point adjoints
  /// (u_bar, ux_bar, uxx_bar) with respect to every network parameter, in
  /// flatten_params order. grad must have p.param_count() entries.
  void backward(const NetParams& p, const Eigen::VectorXd& u_bar,
                const Eigen::VectorXd& ux_bar, const Eigen::VectorXd& uxx_bar,
                Eigen::Ref<Eigen::VectorXd> grad) const;

 private:
  Eigen::MatrixXd X_;
  std::vector<Eigen::MatrixXd> t_, zx_, zxx_;  // per hidden layer
  Eigen::VectorXd u_, ux_, uxx_;
};

/// Throws NumericFault naming the first non-finite entry.
void check_finite(const Eigen::VectorXd& v, const char* context);

}  // namespace pinnlab
