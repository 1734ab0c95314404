#include "pinnlab/pareto.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

namespace pinnlab {

std::vector<std::size_t> non_dominated(std::span<const ParetoPoint> pts) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (j == i) continue;
      // j dominates i: no worse in both, strictly better in one
      if (pts[j].l_pde <= pts[i].l_pde && pts[j].l_d <= pts[i].l_d &&
          (pts[j].l_pde < pts[i].l_pde || pts[j].l_d < pts[i].l_d))
        dominated = true;
    }
    if (!dominated) keep.push_back(i);
  }
  return keep;
}

ParetoSweepResult pareto_sweep(const ScenarioDataset& ds,
                               std::span<const double> alphas, const Schedule& sched,
                               std::uint64_t seed, const TrainOptions& opts,
                               int workers, bool include_lbpinn) {
  for (double a : alphas)
    if (!(a >= 0.0 && a <= 1.0))
      throw std::invalid_argument("pareto_sweep: alpha outside [0,1]");

  ParetoSweepResult result;
  result.runs.resize(alphas.size() + (include_lbpinn ? 1 : 0));

  std::atomic<std::size_t> next{0};
  const std::size_t total = result.runs.size();
  const auto worker = [&] {
    for (std::size_t k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
      ParetoRun& run = result.runs[k];
      Weighting w;
      if (k < alphas.size()) {
        w.kind = WeightingKind::fixed;
        w.alpha = alphas[k];
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", alphas[k]);
        run.label = buf;
        run.alpha = alphas[k];
      } else {
        w.kind = WeightingKind::lbpinn;
        run.label = "lbpinn";
        run.alpha = -1.0;
      }
      run.record = run_schedule(ds, sched, seed, w, opts);
      run.final_point = {run.record.final_losses.l_pde, run.record.final_losses.l_d};
    }
  };

  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(total)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<ParetoPoint> finals;
  finals.reserve(alphas.size());
  for (std::size_t k = 0; k < alphas.size(); ++k)
    finals.push_back(result.runs[k].final_point);
  result.front = non_dominated(finals);
  return result;
}

}  // namespace pinnlab
