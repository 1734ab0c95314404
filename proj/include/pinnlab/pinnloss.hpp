#pragma once

#include <array>
#include <optional>
#include <span>

#include "pinnlab/tapenet.hpp"

namespace pinnlab {

/// Residual-enforcement points. X feeds the network (x or (x, scaled nu)),
/// nu and source carry the physical viscosity and S(x, nu) per point.
struct CollocationSet {
  Eigen::MatrixXd X;
  Eigen::VectorXd nu;
  Eigen::VectorXd source;
  Eigen::Index size() const { return X.rows(); }
};

/// Labeled points (training data, test data, or boundary points).
struct LabeledSet {
  Eigen::MatrixXd X;
  Eigen::VectorXd nu;
  Eigen::VectorXd y;
  Eigen::Index size() const { return X.rows(); }
};

struct LossBreakdown {
  double l_pde = 0.0;
  double l_bc = 0.0;
  double l_d = 0.0;
  double total = 0.0;
  std::array<double, 3> sigma{1.0, 1.0, 1.0};  // (pde, bc, d); 1s unless lbPINN
};

/// Split of the data loss computed with inconsistent labels:
///   mean (u_noisy - u_net)^2 = clean + cross + bias
struct EffectiveLossParts {
  double clean;  // mean (u_true - u_net)^2
  double cross;  // mean 2 eps (u_true - u_net)
  double bias;   // mean eps^2
  double effective() const { return clean + cross + bias; }
};

double loss_pde(const NetParams& p, const CollocationSet& colloc);
double loss_data(const NetParams& p, const LabeledSet& data);
double loss_bc(const NetParams& p, const LabeledSet& bc);

/// alpha*l_pde + (1-alpha)*(l_d + l_bc); alpha must lie in [0,1].
double total_fixed(double alpha, double l_pde, double l_bc, double l_d);

/// sum_i l_i/(2 sigma_i^2) + sum_i log sigma_i with sigma_i = exp(log_sigma_i).
double total_lbpinn(std::span<const double, 3> log_sigmas, double l_pde, double l_bc,
                    double l_d);

EffectiveLossParts effective_decomposition(const NetParams& p, const Eigen::MatrixXd& X,
                                           const Eigen::VectorXd& true_labels,
                                           const Eigen::VectorXd& noisy_labels);

enum class WeightingKind { fixed, lbpinn };
struct Weighting {
  WeightingKind kind = WeightingKind::lbpinn;
  double alpha = 0.5;  // only meaningful for fixed
};

enum class LossPhase {
  warmup,  // PDE term masked; sigmas pinned at 1 and not trainable
  full
};

struct CompositeEval {
  LossBreakdown parts;
  double objective = 0.0;  // scalar the optimizer sees in this phase
  Eigen::VectorXd grad;    // wrt [theta; log_sigma] (log_sigma only for lbPINN)
};

/// Assembles the phase objective and, when want_grad, its exact gradient.
/// colloc_subset restricts the PDE term to a mini-batch (empty = all points);
/// data and bc are always full-batch. extra_data, when present, is appended
/// to the data term (parametric warm-up augmentation).
CompositeEval eval_composite(const NetParams& p, std::span<const double, 3> log_sigma,
                             const CollocationSet& colloc,
                             std::span<const Eigen::Index> colloc_subset,
                             const LabeledSet& data, const LabeledSet& bc,
                             const LabeledSet* extra_data, LossPhase phase,
                             const Weighting& w, bool want_grad);

}  // namespace pinnlab
