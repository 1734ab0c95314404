#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pinnlab/optim.hpp"
#include "pinnlab/pinnloss.hpp"
#include "pinnlab/scenarios.hpp"

namespace pinnlab {

/// Three-phase training schedule. Warm-up and AdamW count epochs; L-BFGS is
/// full-batch, one iteration per epoch.
struct Schedule {
  int warmup_epochs = 50;
  int adamw_epochs = 2000;
  int lbfgs_epochs = 3000;
  int batch_size = 500;
  int record_stride = 60;

  static Schedule standard_preset() { return {50, 2000, 3000, 500, 60}; }
  static Schedule parametric_preset() { return {500, 20000, 160000, 120, 400}; }
};

struct TraceRow {
  std::int64_t iter = 0;
  std::string phase;  // "warmup" | "adamw" | "lbfgs"
  double l_pde = 0.0, l_bc = 0.0, l_d = 0.0;
  double sigma_pde = 1.0, sigma_bc = 1.0, sigma_d = 1.0;
  double test_rmse = 0.0;
};

struct RunRecord {
  std::vector<TraceRow> trace;
  std::string termination = "completed";
  LossBreakdown final_losses;
  double final_test_rmse = 0.0;
  std::int64_t iterations = 0;
  std::vector<int> layer_sizes;
  Eigen::VectorXd final_theta;                // network parameters only
  std::array<double, 3> final_log_sigma{0.0, 0.0, 0.0};
};

struct TrainOptions {
  std::vector<int> layer_sizes{1, 64, 64, 64, 64, 1};
  AdamWOptions adamw;
  double sigma_lr_scale = 0.1;  // log-sigma AdamW rate = lr * this
  LbfgsOptions lbfgs;
};

/// Parametric warm-up augmentation: training labels from each source
/// viscosity (1e-1, 1e-3, 1e-6) re-attached to the paired held-out viscosity
/// (1e-2, 1e-4, 1e-5). Empty for standard mode.
LabeledSet warmup_augmentation(const ScenarioDataset& ds);

/// Warm-up (AdamW on data+BC, PDE masked, sigmas pinned at 1), then AdamW on
/// the weighted composite with collocation mini-batches, then full-batch
/// L-BFGS over all trainable parameters. Records full-batch loss components,
/// sigmas and testRMSE every record_stride iterations and at the final
/// iterate.
RunRecord run_schedule(const ScenarioDataset& ds, const Schedule& sched,
                       std::uint64_t seed, const Weighting& weighting,
                       const TrainOptions& opts);

}  // namespace pinnlab
