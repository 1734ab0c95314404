#include "pinnlab/scenarios.hpp"

#include <algorithm>
#include <cmath>

#include "pinnlab/sobol.hpp"
#include "pinnlab/tapenet.hpp"

namespace pinnlab {

std::string to_string(Mode m) { return m == Mode::standard ? "standard" : "parametric"; }

std::string to_string(Tag t) {
  switch (t) {
    case Tag::C1: return "C1";
    case Tag::C2: return "C2";
    case Tag::C3: return "C3";
    default: return "analytical";
  }
}

Mode mode_from_string(const std::string& s) {
  if (s == "standard") return Mode::standard;
  if (s == "parametric") return Mode::parametric;
  throw std::invalid_argument("unknown mode: " + s);
}

Tag tag_from_string(const std::string& s) {
  if (s == "C1" || s == "c1") return Tag::C1;
  if (s == "C2" || s == "c2") return Tag::C2;
  if (s == "C3" || s == "c3") return Tag::C3;
  if (s == "analytical" || s == "Analytical") return Tag::analytical;
  throw std::invalid_argument("unknown tag: " + s);
}

int tag_mesh_nodes(Tag t) {
  switch (t) {
    case Tag::C1: return 81;
    case Tag::C2: return 641;
    case Tag::C3: return 7121;
    default: return 0;
  }
}

int tag_eval_nodes(Tag t) { return t == Tag::analytical ? 7121 : tag_mesh_nodes(t); }

double scale_viscosity(double nu, double nu_min, double nu_max) {
  if (!(nu >= nu_min && nu <= nu_max))
    throw std::invalid_argument("scale_viscosity: nu outside configured range");
  const double lo = std::log(nu_min), hi = std::log(nu_max);
  return 2.0 * (std::log(nu) - lo) / (hi - lo) - 1.0;
}

double unscale_viscosity(double scaled, double nu_min, double nu_max) {
  const double lo = std::log(nu_min), hi = std::log(nu_max);
  return std::exp(lo + 0.5 * (scaled + 1.0) * (hi - lo));
}

int nearest_node(double target_x, const Mesh& mesh) {
  const double t = (target_x - mesh.nodes.front()) / mesh.dx;
  int i = static_cast<int>(std::lround(t));
  i = std::clamp(i, 0, mesh.n_nodes - 1);
  // resolve against neighbors; ties go to the lower index
  int best = i;
  double bd = std::abs(mesh.nodes[i] - target_x);
  for (int j : {i - 1, i + 1}) {
    if (j < 0 || j >= mesh.n_nodes) continue;
    const double d = std::abs(mesh.nodes[j] - target_x);
    if (d < bd || (d == bd && j < best)) {
      best = j;
      bd = d;
    }
  }
  return best;
}

const FdSolution* FdSolutionSet::find(double nu) const {
  for (const auto& s : solutions_)
    if (std::abs(s.nu - nu) <= 1e-12 * nu) return &s;
  return nullptr;
}

namespace {

Eigen::MatrixXd inputs_for(Mode mode, const Eigen::VectorXd& xs, double nu) {
  if (mode == Mode::standard) return xs;
  Eigen::MatrixXd X(xs.size(), 2);
  X.col(0) = xs;
  X.col(1).setConstant(scale_viscosity(nu));
  return X;
}

// Labeled points at given x locations for one viscosity; labels from the FD
// solution (exact node lookup) or the manufactured field.
void append_labeled(LabeledSet& set, Mode mode, Tag tag, const FdSolutionSet& fd,
                    std::span<const double> xs, double nu, LogBase base) {
  const Eigen::Index n0 = set.X.rows();
  const Eigen::Index m = static_cast<Eigen::Index>(xs.size());
  set.X.conservativeResize(n0 + m, mode == Mode::standard ? 1 : 2);
  set.nu.conservativeResize(n0 + m);
  set.y.conservativeResize(n0 + m);

  const FdSolution* sol = nullptr;
  if (tag != Tag::analytical) {
    sol = fd.find(nu);
    if (sol == nullptr)
      throw std::runtime_error("build_scenario: missing FD solution for tag " +
                               to_string(tag) + " at nu=" + std::to_string(nu));
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    double x = xs[k], y;
    if (sol != nullptr) {
      const int idx = nearest_node(x, sol->mesh);
      x = sol->mesh.nodes[idx];  // label lives exactly at its node
      y = sol->values[idx];
    } else {
      y = eval_mms(x, Viscosity(nu), base);
    }
    set.X(n0 + k, 0) = x;
    if (mode == Mode::parametric) set.X(n0 + k, 1) = scale_viscosity(nu);
    set.nu[n0 + k] = nu;
    set.y[n0 + k] = y;
  }
}

}  // namespace

ScenarioDataset build_scenario(Mode mode, Tag tag, const FdSolutionSet& fd,
                               LogBase base) {
  ScenarioDataset ds;
  ds.mode = mode;
  ds.tag = tag;
  ds.log_base = base;

  if (mode == Mode::standard) {
    const double nu = kStandardNu;
    ds.train_nus = {nu};
    ds.test_nus = {nu};

    const int n_col = 1000;
    ds.collocation.X.resize(n_col, 1);
    ds.collocation.nu.resize(n_col);
    ds.collocation.source.resize(n_col);
    for (int i = 0; i < n_col; ++i) {
      const double x = -1.0 + 2.0 * i / (n_col - 1.0);
      ds.collocation.X(i, 0) = x;
      ds.collocation.nu[i] = nu;
      ds.collocation.source[i] = eval_mms_derivs(x, Viscosity(nu), base).source;
    }

    append_labeled(ds.train, mode, tag, fd, kStandardTrainX, nu, base);
    append_labeled(ds.test, mode, tag, fd, kStandardTestX, nu, base);

    ds.bc.X.resize(1, 1);
    ds.bc.X(0, 0) = -1.0;
    ds.bc.nu.resize(1);
    ds.bc.nu[0] = nu;
    ds.bc.y.resize(1);
    ds.bc.y[0] = eval_mms(-1.0, Viscosity(nu), base);
    return ds;
  }

  // Parametric mode.
  ds.train_nus.assign(std::begin(kParametricTrainNu), std::end(kParametricTrainNu));
  ds.test_nus.assign(std::begin(kParametricTestNu), std::end(kParametricTestNu));

  const int n_col = 1500;
  const auto pts = sobol_2d(n_col, /*skip_zero=*/true);
  ds.collocation.X.resize(n_col, 2);
  ds.collocation.nu.resize(n_col);
  ds.collocation.source.resize(n_col);
  for (int i = 0; i < n_col; ++i) {
    const double x = 2.0 * pts[i][0] - 1.0;
    const double eta = 2.0 * pts[i][1] - 1.0;
    const double nu = unscale_viscosity(eta);
    ds.collocation.X(i, 0) = x;
    ds.collocation.X(i, 1) = eta;
    ds.collocation.nu[i] = nu;
    ds.collocation.source[i] = eval_mms_derivs(x, Viscosity(nu), base).source;
  }

  // 81 spatial locations = the C1 mesh nodes; C2/C3 take their nearest own
  // nodes (coincident for these nested meshes).
  const Mesh c1 = build_mesh(81);
  for (double nu : ds.train_nus) append_labeled(ds.train, mode, tag, fd, c1.nodes, nu, base);
  for (double nu : ds.test_nus) append_labeled(ds.test, mode, tag, fd, c1.nodes, nu, base);

  const int n_bc = 50;
  ds.bc.X.resize(n_bc, 2);
  ds.bc.nu.resize(n_bc);
  ds.bc.y.resize(n_bc);
  for (int i = 0; i < n_bc; ++i) {
    const double eta = -1.0 + 2.0 * i / (n_bc - 1.0);
    const double nu = unscale_viscosity(eta);
    ds.bc.X(i, 0) = -1.0;
    ds.bc.X(i, 1) = eta;
    ds.bc.nu[i] = nu;
    ds.bc.y[i] = eval_mms(-1.0, Viscosity(nu), base);
  }
  return ds;
}

PredictFn make_net_predictor(const NetParams& params, Mode mode, double nu_min,
                             double nu_max) {
  NetParams copy = params;
  return [copy, mode, nu_min, nu_max](const Eigen::VectorXd& xs, double nu) {
    Eigen::MatrixXd X;
    if (mode == Mode::standard) {
      X = xs;
    } else {
      X.resize(xs.size(), 2);
      X.col(0) = xs;
      X.col(1).setConstant(scale_viscosity(nu, nu_min, nu_max));
    }
    JetTape tape;
    tape.forward(copy, X);
    return Eigen::VectorXd(tape.u());
  };
}

PredictFn make_mms_predictor(LogBase base) {
  return [base](const Eigen::VectorXd& xs, double nu) {
    Eigen::VectorXd u(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i)
      u[i] = eval_mms(xs[i], Viscosity(nu), base);
    return u;
  };
}

double test_rmse(const PredictFn& predict, const ScenarioDataset& ds) {
  if (ds.test.size() == 0) throw std::invalid_argument("test_rmse: empty test set");
  double acc = 0.0;
  Eigen::Index count = 0;
  for (double nu : ds.test_nus) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (Eigen::Index i = 0; i < ds.test.size(); ++i) {
      if (ds.test.nu[i] == nu) {
        xs.push_back(ds.test.X(i, 0));
        ys.push_back(ds.test.y[i]);
      }
    }
    const Eigen::VectorXd u =
        predict(Eigen::Map<const Eigen::VectorXd>(xs.data(), xs.size()), nu);
    for (size_t k = 0; k < ys.size(); ++k) {
      const double d = ys[k] - u[static_cast<Eigen::Index>(k)];
      acc += d * d;
      ++count;
    }
  }
  return std::sqrt(acc / static_cast<double>(count));
}

double test_rmse(const NetParams& params, const ScenarioDataset& ds) {
  JetTape tape;
  tape.forward(params, ds.test.X);
  return std::sqrt((ds.test.y - tape.u()).squaredNorm() /
                   static_cast<double>(ds.test.size()));
}

EvalReport evaluate_vs_analytic(const PredictFn& predict, Tag tag,
                                std::span<const double> nu_grid, LogBase base) {
  EvalReport report;
  const Mesh mesh = build_mesh(tag_eval_nodes(tag));
  const Eigen::VectorXd xs =
      Eigen::Map<const Eigen::VectorXd>(mesh.nodes.data(), mesh.n_nodes);
  for (double nu : nu_grid) {
    const Eigen::VectorXd u = predict(xs, nu);
    double acc = 0.0;
    for (int i = 0; i < mesh.n_nodes; ++i) {
      const double d = u[i] - eval_mms(mesh.nodes[i], Viscosity(nu), base);
      acc += d * d;
    }
    report.pinn_rmse_per_nu.emplace_back(nu, std::sqrt(acc / mesh.n_nodes));
  }
  return report;
}

double fd_rmse_vs_analytic(const FdSolution& sol) {
  double acc = 0.0;
  for (int i = 0; i < sol.mesh.n_nodes; ++i) {
    const double d =
        sol.values[i] - eval_mms(sol.mesh.nodes[i], Viscosity(sol.nu), sol.log_base);
    acc += d * d;
  }
  return std::sqrt(acc / sol.mesh.n_nodes);
}

std::vector<double> log_nu_grid(int count) {
  std::vector<double> grid(count);
  const double lo = std::log(kNuMin), hi = std::log(kNuMax);
  for (int i = 0; i < count; ++i)
    grid[i] = std::exp(lo + (hi - lo) * i / (count - 1.0));
  return grid;
}

}  // namespace pinnlab
