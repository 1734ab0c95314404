#pragma once

#include <span>

#include "pinnlab/trainer.hpp"

namespace pinnlab {

struct ParetoPoint {
  double l_pde = 0.0;
  double l_d = 0.0;
};

struct ParetoRun {
  std::string label;   // formatted alpha, or "lbpinn"
  double alpha = -1.0; // -1 marks the lbPINN overlay run
  RunRecord record;
  ParetoPoint final_point;
};

struct ParetoSweepResult {
  std::vector<ParetoRun> runs;          // fixed-alpha runs first, then lbPINN
  std::vector<std::size_t> front;       // indices into runs of non-dominated
                                        // fixed-alpha final points
};

/// Indices of points not dominated by any other (minimizing both coordinates).
std::vector<std::size_t> non_dominated(std::span<const ParetoPoint> pts);

inline constexpr double kDefaultAlphas[9] = {0.01, 0.05, 0.1,  0.25, 0.5,
                                             0.75, 0.9,  0.95, 0.99};

/// Runs the fixed-weight schedule once per alpha (plus an optional lbPINN
/// overlay run) and extracts the front from the final iterates. Runs are
/// independent; up to `workers` execute concurrently.
ParetoSweepResult pareto_sweep(const ScenarioDataset& ds,
                               std::span<const double> alphas, const Schedule& sched,
                               std::uint64_t seed, const TrainOptions& opts,
                               int workers, bool include_lbpinn);

}  // namespace pinnlab
