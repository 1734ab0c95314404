#include "pinnlab/optim.hpp"

#include <cmath>

#include "pinnlab/tapenet.hpp"

namespace pinnlab {

AdamW::AdamW(Eigen::Index n, AdamWOptions opts)
    : opts_(opts),
      m_(Eigen::VectorXd::Zero(n)),
      v_(Eigen::VectorXd::Zero(n)),
      decay_mask_(Eigen::VectorXd::Ones(n)),
      lr_scale_(Eigen::VectorXd::Ones(n)) {}

void AdamW::set_decay_mask(Eigen::VectorXd mask) {
  if (mask.size() != m_.size())
    throw std::invalid_argument("AdamW::set_decay_mask: size mismatch");
  decay_mask_ = std::move(mask);
}

void AdamW::set_lr_scale(Eigen::VectorXd scale) {
  if (scale.size() != m_.size())
    throw std::invalid_argument("AdamW::set_lr_scale: size mismatch");
  lr_scale_ = std::move(scale);
}

void AdamW::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("AdamW::step: size mismatch");
  check_finite(grad, "AdamW gradient");
  ++t_;
  m_ = opts_.beta1 * m_ + (1.0 - opts_.beta1) * grad;
  v_ = opts_.beta2 * v_ + (1.0 - opts_.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
  params.array() -= opts_.lr * lr_scale_.array() * (m_.array() / bc1) /
                    ((v_.array() / bc2).sqrt() + opts_.eps);
  if (opts_.weight_decay != 0.0)
    params.array() -= opts_.lr * opts_.weight_decay * decay_mask_.array() * params.array();
}

Lbfgs::Lbfgs(Eigen::Index n, LbfgsOptions opts) : opts_(opts), n_(n) {}

Eigen::VectorXd Lbfgs::two_loop_direction() const {
  Eigen::VectorXd q = g_;
  const int m = static_cast<int>(s_.size());
  std::vector<double> a(m);
  for (int i = m - 1; i >= 0; --i) {
    a[i] = rho_[i] * s_[i].dot(q);
    q -= a[i] * y_[i];
  }
  const double gamma = s_.back().dot(y_.back()) / y_.back().squaredNorm();
  q *= gamma;
  for (int i = 0; i < m; ++i) {
    const double b = rho_[i] * y_[i].dot(q);
    q += (a[i] - b) * s_[i];
  }
  return -q;
}

LbfgsStepStatus Lbfgs::step(Eigen::VectorXd& params, const LossGradFn& fg) {
  if (!have_eval_) {
    g_.resize(n_);
    f_ = fg(params, g_);
    have_eval_ = true;
  }
  check_finite(g_, "L-BFGS gradient");

  Eigen::VectorXd d = s_.empty() ? Eigen::VectorXd(-g_) : two_loop_direction();
  double dd = g_.dot(d);
  if (!(dd < 0.0)) {  // not a descent direction: drop history, steepest descent
    s_.clear();
    y_.clear();
    rho_.clear();
    d = -g_;
    dd = g_.dot(d);
    if (!(dd < 0.0)) return LbfgsStepStatus::failed;  // zero gradient: stationary
  }
  last_dd_ = dd;

  const double f0 = f_;
  const Eigen::VectorXd x0 = params;
  const Eigen::VectorXd g0 = g_;

  Eigen::VectorXd g_trial(n_);
  const auto phi = [&](double t, double& dphi) {
    params = x0 + t * d;
    const double f = fg(params, g_trial);
    dphi = g_trial.dot(d);
    return f;
  };

  // Strong-Wolfe line search (bracket + zoom).
  const double gnorm = g0.norm();
  double alpha = first_step_ ? std::min(1.0, 1.0 / std::max(1.0, gnorm)) : 1.0;
  double alpha_prev = 0.0, f_prev = f0, dphi_prev = dd;
  double lo = -1.0, hi = -1.0, f_lo = 0.0, f_hi = 0.0, dphi_lo = 0.0;
  bool bracketed = false;
  int trials = 0;
  double accepted = -1.0, f_acc = 0.0;

  while (trials < opts_.max_line_trials) {
    double dphi;
    const double f = phi(alpha, dphi);
    ++trials;
    if (!std::isfinite(f)) {  // overshoot into a non-finite region: shrink hard
      alpha = 0.5 * (alpha_prev + alpha);
      continue;
    }
    if (f > f0 + opts_.c1 * alpha * dd || (trials > 1 && f >= f_prev)) {
      lo = alpha_prev;
      f_lo = f_prev;
      dphi_lo = dphi_prev;
      hi = alpha;
      f_hi = f;
      bracketed = true;
      break;
    }
    if (std::abs(dphi) <= -opts_.c2 * dd) {
      accepted = alpha;
      f_acc = f;
      break;
    }
    if (dphi >= 0.0) {
      lo = alpha;
      f_lo = f;
      dphi_lo = dphi;
      hi = alpha_prev;
      f_hi = f_prev;
      bracketed = true;
      break;
    }
    alpha_prev = alpha;
    f_prev = f;
    dphi_prev = dphi;
    alpha *= 2.0;
  }

  if (accepted < 0.0 && bracketed) {
    while (trials < opts_.max_line_trials) {
      if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
      // quadratic model through (lo, f_lo, dphi_lo) and (hi, f_hi); exact for
      // quadratic objectives, safeguarded toward bisection otherwise
      double cand = 0.5 * (lo + hi);
      const double h = hi - lo;
      const double curv = f_hi - f_lo - dphi_lo * h;
      if (curv > 0.0) {
        const double q = lo - 0.5 * dphi_lo * h * h / curv;
        const double a = std::min(lo, hi), b = std::max(lo, hi);
        const double margin = 0.1 * (b - a);
        if (q > a + margin && q < b - margin) cand = q;
      }
      double dphi;
      const double f = phi(cand, dphi);
      ++trials;
      if (!std::isfinite(f) || f > f0 + opts_.c1 * cand * dd || f >= f_lo) {
        hi = cand;
        f_hi = f;
        continue;
      }
      if (std::abs(dphi) <= -opts_.c2 * dd) {
        accepted = cand;
        f_acc = f;
        break;
      }
      if (dphi * (hi - lo) >= 0.0) {
        hi = lo;
        f_hi = f_lo;
      }
      lo = cand;
      f_lo = f;
      dphi_lo = dphi;
    }
    // Wolfe conditions never both held: settle for the best sufficient-decrease
    // point found, which keeps the phase moving without a curvature pair.
    if (accepted < 0.0 && lo > 0.0 && f_lo < f0) {
      double dphi;
      f_acc = phi(lo, dphi);
      accepted = lo;
      s_.clear();
      y_.clear();
      rho_.clear();
      f_ = f_acc;
      g_ = g_trial;
      first_step_ = false;
      return LbfgsStepStatus::fallback_gradient;
    }
  }

  if (accepted > 0.0) {
    const Eigen::VectorXd s = params - x0;
    const Eigen::VectorXd y = g_trial - g0;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      s_.push_back(s);
      y_.push_back(y);
      rho_.push_back(1.0 / sy);
      if (static_cast<int>(s_.size()) > opts_.memory) {
        s_.erase(s_.begin());
        y_.erase(y_.begin());
        rho_.erase(rho_.begin());
      }
    }
    f_ = f_acc;
    g_ = g_trial;
    first_step_ = false;
    return LbfgsStepStatus::accepted;
  }

  // Line search failed outright: discard history and try plain backtracking
  // on the steepest-descent direction.
  s_.clear();
  y_.clear();
  rho_.clear();
  const double gdd = -g0.squaredNorm();
  double t = 1.0 / std::max(1.0, gnorm);
  for (int k = 0; k < 40; ++k, t *= 0.5) {
    params = x0 - t * g0;
    const double f = fg(params, g_trial);
    if (std::isfinite(f) && f <= f0 + opts_.c1 * t * gdd) {
      f_ = f;
      g_ = g_trial;
      first_step_ = false;
      return LbfgsStepStatus::fallback_gradient;
    }
  }
  params = x0;
  g_ = g0;
  f_ = f0;
  return LbfgsStepStatus::failed;
}

}  // namespace pinnlab
