#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

namespace pinnlab {

struct AdamWOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
};

/// Decoupled-weight-decay Adam with bias-corrected moments.
class AdamW {
 public:
  AdamW(Eigen::Index n, AdamWOptions opts = {});

  /// Entries with mask 0 are exempt from weight decay (e.g. log-sigma slots).
  void set_decay_mask(Eigen::VectorXd mask);
  /// Per-entry multiplier on the learning rate (default all ones).
  void set_lr_scale(Eigen::VectorXd scale);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  std::int64_t step_count() const { return t_; }

 private:
  AdamWOptions opts_;
  Eigen::VectorXd m_, v_, decay_mask_, lr_scale_;
  std::int64_t t_ = 0;
};

struct LbfgsOptions {
  int memory = 10;
  double c1 = 1e-4;  // sufficient-decrease coefficient
  double c2 = 0.9;   // curvature coefficient (strong Wolfe)
  int max_line_trials = 20;
};

enum class LbfgsStepStatus {
  accepted,           // strong-Wolfe step taken
  fallback_gradient,  // line search failed; backtracking gradient step taken
  failed              // no decrease found at all; phase should stop
};

/// Evaluates loss and writes the gradient; returns the loss.
using LossGradFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS with two-loop recursion and a strong-Wolfe line
/// search. Curvature pairs are kept only when s.y > 1e-10 |s||y|. A failed
/// line search discards the history and falls back to one backtracking
/// gradient step; a failed fallback reports LbfgsStepStatus::failed and
/// leaves the parameters untouched.
class Lbfgs {
 public:
  Lbfgs(Eigen::Index n, LbfgsOptions opts = {});

  LbfgsStepStatus step(Eigen::VectorXd& params, const LossGradFn& fg);

  double current_loss() const { return f_; }
  const Eigen::VectorXd& current_grad() const { return g_; }
  int history_size() const { return static_cast<int>(s_.size()); }
  double last_directional_derivative() const { return last_dd_; }

 private:
  Eigen::VectorXd two_loop_direction() const;

  LbfgsOptions opts_;
  Eigen::Index n_;
  std::vector<Eigen::VectorXd> s_, y_;
  std::vector<double> rho_;
  Eigen::VectorXd g_;
  double f_ = 0.0;
  bool have_eval_ = false;
  bool first_step_ = true;
  double last_dd_ = 0.0;
};

}  // namespace pinnlab
