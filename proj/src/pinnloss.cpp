#include "pinnlab/pinnloss.hpp"

#include <cmath>

namespace pinnlab {

namespace {

struct TermEval {
  double value = 0.0;
  JetTape tape;
  Eigen::VectorXd residual_or_diff;  // r for PDE, (u - y) for data terms
};

TermEval eval_pde_term(const NetParams& p, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& nu, const Eigen::VectorXd& src) {
  TermEval t;
  t.tape.forward(p, X);
  t.residual_or_diff = (t.tape.u().array() * t.tape.u_x().array() -
                        nu.array() * t.tape.u_xx().array() - src.array())
                           .matrix();
  t.value = t.residual_or_diff.squaredNorm() / static_cast<double>(X.rows());
  return t;
}

TermEval eval_data_term(const NetParams& p, const Eigen::MatrixXd& X,
                        const Eigen::VectorXd& y) {
  TermEval t;
  t.tape.forward(p, X);
  t.residual_or_diff = t.tape.u() - y;
  t.value = t.residual_or_diff.squaredNorm() / static_cast<double>(X.rows());
  return t;
}

void add_pde_grad(const NetParams& p, const TermEval& t, const Eigen::VectorXd& nu,
                  double weight, Eigen::Ref<Eigen::VectorXd> grad) {
  const double c = 2.0 * weight / static_cast<double>(t.tape.batch());
  const Eigen::VectorXd ub = c * (t.residual_or_diff.array() * t.tape.u_x().array());
  const Eigen::VectorXd uxb = c * (t.residual_or_diff.array() * t.tape.u().array());
  const Eigen::VectorXd uxxb = -c * (t.residual_or_diff.array() * nu.array());
  t.tape.backward(p, ub, uxb, uxxb, grad);
}

void add_data_grad(const NetParams& p, const TermEval& t, double weight,
                   Eigen::Ref<Eigen::VectorXd> grad) {
  const double c = 2.0 * weight / static_cast<double>(t.tape.batch());
  const Eigen::VectorXd ub = c * t.residual_or_diff;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(t.tape.batch());
  t.tape.backward(p, ub, zero, zero, grad);
}

}  // namespace

double loss_pde(const NetParams& p, const CollocationSet& colloc) {
  if (colloc.size() == 0) throw std::invalid_argument("loss_pde: empty collocation set");
  return eval_pde_term(p, colloc.X, colloc.nu, colloc.source).value;
}

double loss_data(const NetParams& p, const LabeledSet& data) {
  if (data.size() == 0) throw std::invalid_argument("loss_data: empty set");
  return eval_data_term(p, data.X, data.y).value;
}

double loss_bc(const NetParams& p, const LabeledSet& bc) {
  if (bc.size() == 0) throw std::invalid_argument("loss_bc: empty set");
  return eval_data_term(p, bc.X, bc.y).value;
}

double total_fixed(double alpha, double l_pde, double l_bc, double l_d) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("total_fixed: alpha must lie in [0,1]");
  return alpha * l_pde + (1.0 - alpha) * (l_d + l_bc);
}

double total_lbpinn(std::span<const double, 3> log_sigmas, double l_pde, double l_bc,
                    double l_d) {
  const double sp = std::exp(log_sigmas[0]);
  const double sb = std::exp(log_sigmas[1]);
  const double sd = std::exp(log_sigmas[2]);
  return l_pde / (2.0 * sp * sp) + l_bc / (2.0 * sb * sb) + l_d / (2.0 * sd * sd) +
         log_sigmas[0] + log_sigmas[1] + log_sigmas[2];
}

EffectiveLossParts effective_decomposition(const NetParams& p, const Eigen::MatrixXd& X,
                                           const Eigen::VectorXd& true_labels,
                                           const Eigen::VectorXd& noisy_labels) {
  if (X.rows() != true_labels.size() || X.rows() != noisy_labels.size())
    throw std::invalid_argument("effective_decomposition: label length mismatch");
  JetTape tape;
  tape.forward(p, X);
  const Eigen::ArrayXd d = true_labels.array() - tape.u().array();
  const Eigen::ArrayXd eps = noisy_labels.array() - true_labels.array();
  const double n = static_cast<double>(X.rows());
  EffectiveLossParts parts;
  parts.clean = d.square().sum() / n;
  parts.cross = 2.0 * (eps * d).sum() / n;
  parts.bias = eps.square().sum() / n;
  return parts;
}

CompositeEval eval_composite(const NetParams& p, std::span<const double, 3> log_sigma,
                             const CollocationSet& colloc,
                             std::span<const Eigen::Index> colloc_subset,
                             const LabeledSet& data, const LabeledSet& bc,
                             const LabeledSet* extra_data, LossPhase phase,
                             const Weighting& w, bool want_grad) {
  const bool lbpinn = w.kind == WeightingKind::lbpinn;
  const Eigen::Index n_theta = p.param_count();

  CompositeEval out;
  if (want_grad) out.grad = Eigen::VectorXd::Zero(n_theta + (lbpinn ? 3 : 0));

  // Data term, with optional warm-up augmentation appended.
  const Eigen::MatrixXd* dX = &data.X;
  const Eigen::VectorXd* dy = &data.y;
  Eigen::MatrixXd aug_X;
  Eigen::VectorXd aug_y;
  if (extra_data != nullptr && extra_data->size() > 0) {
    aug_X.resize(data.X.rows() + extra_data->X.rows(), data.X.cols());
    aug_X << data.X, extra_data->X;
    aug_y.resize(data.y.size() + extra_data->y.size());
    aug_y << data.y, extra_data->y;
    dX = &aug_X;
    dy = &aug_y;
  }

  const TermEval td = eval_data_term(p, *dX, *dy);
  const TermEval tb = eval_data_term(p, bc.X, bc.y);
  out.parts.l_d = td.value;
  out.parts.l_bc = tb.value;

  double wp = 0.0, wb = 0.0, wd = 0.0;
  if (phase == LossPhase::warmup) {
    // 1/sigma_pde^2 := 0, sigma_bc = sigma_d := 1, sigmas not trainable.
    if (lbpinn) {
      wb = wd = 0.5;
    } else {
      wb = wd = 1.0 - w.alpha;
    }
    out.parts.l_pde = 0.0;
    out.objective = wb * out.parts.l_bc + wd * out.parts.l_d;
  } else {
    // Full composite: the PDE term is evaluated on the requested mini-batch.
    std::optional<TermEval> tp;
    Eigen::VectorXd nu_sub;
    if (colloc_subset.empty()) {
      tp = eval_pde_term(p, colloc.X, colloc.nu, colloc.source);
      nu_sub = colloc.nu;
    } else {
      const Eigen::Index m = static_cast<Eigen::Index>(colloc_subset.size());
      Eigen::MatrixXd X(m, colloc.X.cols());
      Eigen::VectorXd nu(m), src(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        X.row(i) = colloc.X.row(colloc_subset[i]);
        nu[i] = colloc.nu[colloc_subset[i]];
        src[i] = colloc.source[colloc_subset[i]];
      }
      tp = eval_pde_term(p, X, nu, src);
      nu_sub = std::move(nu);
    }
    out.parts.l_pde = tp->value;

    if (lbpinn) {
      const double sp = std::exp(log_sigma[0]);
      const double sb = std::exp(log_sigma[1]);
      const double sd = std::exp(log_sigma[2]);
      out.parts.sigma = {sp, sb, sd};
      wp = 1.0 / (2.0 * sp * sp);
      wb = 1.0 / (2.0 * sb * sb);
      wd = 1.0 / (2.0 * sd * sd);
      out.objective = wp * out.parts.l_pde + wb * out.parts.l_bc + wd * out.parts.l_d +
                      log_sigma[0] + log_sigma[1] + log_sigma[2];
    } else {
      wp = w.alpha;
      wb = wd = 1.0 - w.alpha;
      out.objective = total_fixed(w.alpha, out.parts.l_pde, out.parts.l_bc, out.parts.l_d);
    }
    if (want_grad) {
      add_pde_grad(p, *tp, nu_sub, wp, out.grad.head(n_theta));
      if (lbpinn) {
        // d/dlog_sigma_i of l_i/(2 sigma_i^2) + log sigma_i
        out.grad[n_theta + 0] = 1.0 - out.parts.l_pde / (out.parts.sigma[0] * out.parts.sigma[0]);
        out.grad[n_theta + 1] = 1.0 - out.parts.l_bc / (out.parts.sigma[1] * out.parts.sigma[1]);
        out.grad[n_theta + 2] = 1.0 - out.parts.l_d / (out.parts.sigma[2] * out.parts.sigma[2]);
      }
    }
  }
  out.parts.total = out.objective;

  if (want_grad) {
    add_data_grad(p, td, wd, out.grad.head(n_theta));
    add_data_grad(p, tb, wb, out.grad.head(n_theta));
  }
  return out;
}

}  // namespace pinnlab
