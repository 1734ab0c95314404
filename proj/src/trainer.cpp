#include "pinnlab/trainer.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace pinnlab {

// Labels from each source viscosity re-attached to its paired held-out
// viscosity; applies to the canonical parametric layout only.
LabeledSet warmup_augmentation(const ScenarioDataset& ds) {
  LabeledSet fake;
  if (ds.mode != Mode::parametric) return fake;
  constexpr double kPairs[3][2] = {{1e-1, 1e-2}, {1e-3, 1e-4}, {1e-6, 1e-5}};
  std::vector<double> xs, ys, nus;
  for (const auto& pair : kPairs) {
    const double src = pair[0], dst = pair[1];
    for (Eigen::Index i = 0; i < ds.train.size(); ++i) {
      if (ds.train.nu[i] == src) {
        xs.push_back(ds.train.X(i, 0));
        ys.push_back(ds.train.y[i]);
        nus.push_back(dst);
      }
    }
  }
  const Eigen::Index m = static_cast<Eigen::Index>(xs.size());
  if (m == 0) return fake;
  fake.X.resize(m, 2);
  fake.nu.resize(m);
  fake.y.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    fake.X(i, 0) = xs[i];
    fake.X(i, 1) = scale_viscosity(nus[i]);
    fake.nu[i] = nus[i];
    fake.y[i] = ys[i];
  }
  return fake;
}

namespace {

struct FlatState {
  NetParams net;
  std::array<double, 3> log_sigma{0.0, 0.0, 0.0};
  bool lbpinn = false;

  void load(const Eigen::VectorXd& v) {
    const Eigen::Index n = net.param_count();
    unflatten_params(v.head(n), net);
    if (lbpinn)
      for (int i = 0; i < 3; ++i) log_sigma[i] = v[n + i];
  }
};

}  // namespace

RunRecord run_schedule(const ScenarioDataset& ds, const Schedule& sched,
                       std::uint64_t seed, const Weighting& weighting,
                       const TrainOptions& opts) {
  if (static_cast<int>(opts.layer_sizes.front()) != ds.input_dim())
    throw std::invalid_argument(
        "run_schedule: network input dimension does not match dataset mode");
  if (ds.collocation.size() == 0 || ds.train.size() == 0 || ds.bc.size() == 0 ||
      ds.test.size() == 0)
    throw std::invalid_argument("run_schedule: dataset incomplete");

  const bool lbpinn = weighting.kind == WeightingKind::lbpinn;

  FlatState state;
  state.net = init_params(opts.layer_sizes, seed);
  state.lbpinn = lbpinn;
  const Eigen::Index n_theta = state.net.param_count();
  const Eigen::Index n_all = n_theta + (lbpinn ? 3 : 0);

  Eigen::VectorXd params(n_all);
  params.head(n_theta) = flatten_params(state.net);
  if (lbpinn) params.tail(3).setZero();

  const LabeledSet fake = warmup_augmentation(ds);

  RunRecord rec;
  rec.layer_sizes = opts.layer_sizes;

  std::mt19937_64 shuffle_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::int64_t iter = 0;

  const auto record_row = [&](const std::string& phase) {
    state.load(params);
    const auto eval = eval_composite(state.net, state.log_sigma, ds.collocation, {},
                                     ds.train, ds.bc, nullptr, LossPhase::full,
                                     weighting, /*want_grad=*/false);
    TraceRow row;
    row.iter = iter;
    row.phase = phase;
    row.l_pde = eval.parts.l_pde;
    row.l_bc = eval.parts.l_bc;
    row.l_d = eval.parts.l_d;
    row.sigma_pde = eval.parts.sigma[0];
    row.sigma_bc = eval.parts.sigma[1];
    row.sigma_d = eval.parts.sigma[2];
    row.test_rmse = test_rmse(state.net, ds);
    rec.trace.push_back(std::move(row));
  };

  const auto maybe_record = [&](const std::string& phase) {
    if (iter % sched.record_stride == 0) record_row(phase);
  };

  record_row("warmup");  // initial state

  // --- Phase 1: warm-up (PDE masked, sigmas pinned at 1) ---
  {
    AdamW adam(n_all, opts.adamw);
    if (lbpinn) {
      Eigen::VectorXd mask = Eigen::VectorXd::Ones(n_all);
      mask.tail(3).setZero();
      adam.set_decay_mask(mask);
    }
    for (int e = 0; e < sched.warmup_epochs; ++e) {
      state.load(params);
      auto eval = eval_composite(state.net, state.log_sigma, ds.collocation, {},
                                 ds.train, ds.bc, fake.size() ? &fake : nullptr,
                                 LossPhase::warmup, weighting, /*want_grad=*/true);
      adam.step(params, eval.grad);
      ++iter;
      maybe_record("warmup");
    }
  }

  // --- Phase 2: AdamW on the weighted composite, collocation mini-batches ---
  {
    AdamW adam(n_all, opts.adamw);
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(n_all);
    Eigen::VectorXd lrs = Eigen::VectorXd::Ones(n_all);
    if (lbpinn) {
      mask.tail(3).setZero();
      lrs.tail(3).setConstant(opts.sigma_lr_scale);
    }
    adam.set_decay_mask(mask);
    adam.set_lr_scale(lrs);

    const Eigen::Index n_col = ds.collocation.size();
    std::vector<Eigen::Index> order(n_col);
    std::iota(order.begin(), order.end(), 0);
    const int batches =
        static_cast<int>((n_col + sched.batch_size - 1) / sched.batch_size);

    for (int e = 0; e < sched.adamw_epochs; ++e) {
      // Fisher-Yates with the run RNG; partitions the collocation set.
      for (Eigen::Index i = n_col - 1; i > 0; --i) {
        const Eigen::Index j =
            static_cast<Eigen::Index>(shuffle_rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[i], order[j]);
      }
      for (int b = 0; b < batches; ++b) {
        const Eigen::Index lo = static_cast<Eigen::Index>(b) * sched.batch_size;
        const Eigen::Index len = std::min<Eigen::Index>(sched.batch_size, n_col - lo);
        state.load(params);
        auto eval = eval_composite(state.net, state.log_sigma, ds.collocation,
                                   {order.data() + lo, static_cast<size_t>(len)},
                                   ds.train, ds.bc, nullptr, LossPhase::full, weighting,
                                   /*want_grad=*/true);
        adam.step(params, eval.grad);
        ++iter;
        maybe_record("adamw");
      }
    }
  }

  // --- Phase 3: full-batch L-BFGS over all trainable parameters ---
  {
    Lbfgs lbfgs(n_all, opts.lbfgs);
    const LossGradFn fg = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
      state.load(v);
      auto eval = eval_composite(state.net, state.log_sigma, ds.collocation, {},
                                 ds.train, ds.bc, nullptr, LossPhase::full, weighting,
                                 /*want_grad=*/true);
      g = std::move(eval.grad);
      return eval.objective;
    };
    for (int e = 0; e < sched.lbfgs_epochs; ++e) {
      const LbfgsStepStatus status = lbfgs.step(params, fg);
      ++iter;
      maybe_record("lbfgs");
      if (status == LbfgsStepStatus::failed) {
        rec.termination = "lbfgs_stopped_early:no_decrease_at_iter_" + std::to_string(iter);
        break;
      }
    }
  }

  if (rec.trace.empty() || rec.trace.back().iter != iter) record_row("lbfgs");

  state.load(params);
  const auto final_eval = eval_composite(state.net, state.log_sigma, ds.collocation, {},
                                         ds.train, ds.bc, nullptr, LossPhase::full,
                                         weighting, /*want_grad=*/false);
  rec.final_losses = final_eval.parts;
  rec.final_test_rmse = test_rmse(state.net, ds);
  rec.iterations = iter;
  rec.final_theta = params.head(n_theta);
  rec.final_log_sigma = state.log_sigma;
  return rec;
}

}  // namespace pinnlab
