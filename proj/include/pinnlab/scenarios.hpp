#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pinnlab/fdsolve.hpp"
#include "pinnlab/pinnloss.hpp"

namespace pinnlab {

enum class Mode { standard, parametric };
enum class Tag { C1, C2, C3, analytical };

std::string to_string(Mode m);
std::string to_string(Tag t);
Mode mode_from_string(const std::string& s);
Tag tag_from_string(const std::string& s);

/// Mesh resolution backing a scenario's labels. The analytical scenario has
/// no solver mesh; its evaluation nodes are the C3 mesh.
int tag_mesh_nodes(Tag t);
/// Node count used when evaluating a trained model against the analytical
/// solution (C3's mesh for the analytical scenario).
int tag_eval_nodes(Tag t);

inline constexpr double kNuMin = 1e-6;
inline constexpr double kNuMax = 1e-1;
inline constexpr double kStandardNu = 1e-2;
inline constexpr double kStandardTrainX[4] = {-0.55, -0.3, 0.3, 0.8};
inline constexpr double kStandardTestX[5] = {-0.75, -0.45, 0.0, 0.5, 0.9};
inline constexpr double kParametricTrainNu[3] = {1e-1, 1e-3, 1e-6};
inline constexpr double kParametricTestNu[3] = {1e-2, 1e-4, 1e-5};

/// logMinMax: affine map of log(nu) from [log nu_min, log nu_max] onto
/// [-1, 1]. Base-independent by construction.
double scale_viscosity(double nu, double nu_min = kNuMin, double nu_max = kNuMax);
double unscale_viscosity(double scaled, double nu_min = kNuMin, double nu_max = kNuMax);

/// Index of the mesh node closest to target_x; ties resolve to the lower index.
int nearest_node(double target_x, const Mesh& mesh);

struct ScenarioDataset {
  Mode mode = Mode::standard;
  Tag tag = Tag::analytical;
  LogBase log_base = LogBase::natural;
  CollocationSet collocation;
  LabeledSet train, test, bc;
  std::vector<double> train_nus, test_nus;  // distinct viscosities per split
  int input_dim() const { return mode == Mode::standard ? 1 : 2; }
};

/// FD solutions on one mesh, keyed by viscosity.
class FdSolutionSet {
 public:
  void add(FdSolution s) { solutions_.push_back(std::move(s)); }
  const FdSolution* find(double nu) const;
  const std::vector<FdSolution>& all() const { return solutions_; }

 private:
  std::vector<FdSolution> solutions_;
};

/// Assembles the canonical dataset for one (mode, tag) pair. Numerical tags
/// take labels from the matching FD solution values at mesh nodes (never
/// interpolated); the analytical tag evaluates the manufactured solution.
ScenarioDataset build_scenario(Mode mode, Tag tag, const FdSolutionSet& fd,
                               LogBase base = LogBase::natural);

/// Model predictions over a batch of x at fixed viscosity.
using PredictFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& xs, double nu)>;

PredictFn make_net_predictor(const NetParams& params, Mode mode,
                             double nu_min = kNuMin, double nu_max = kNuMax);
PredictFn make_mms_predictor(LogBase base);

double test_rmse(const PredictFn& predict, const ScenarioDataset& ds);
double test_rmse(const NetParams& params, const ScenarioDataset& ds);

struct EvalReport {
  double test_rmse = 0.0;
  std::vector<std::pair<double, double>> pinn_rmse_per_nu;  // (nu, rmse)
  std::vector<std::pair<double, double>> fd_rmse_per_nu;    // reference column
};

/// RMSE of the prediction against the manufactured solution over the tag's
/// evaluation nodes, for each nu in nu_grid. The FD reference column is
/// attached by the caller (it comes from generated data).
EvalReport evaluate_vs_analytic(const PredictFn& predict, Tag tag,
                                std::span<const double> nu_grid, LogBase base);

/// RMSE of an FD solution against the manufactured field over its own nodes.
double fd_rmse_vs_analytic(const FdSolution& sol);

/// Log-spaced viscosity grid over [kNuMin, kNuMax], endpoints included.
std::vector<double> log_nu_grid(int count);

}  // namespace pinnlab
