#include "pinnlab/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <thread>

#include "json.hpp"

namespace pinnlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string weighting_label(const Weighting& w) {
  if (w.kind == WeightingKind::lbpinn) return "lbpinn";
  return "alpha" + format_double(w.alpha);
}

std::string run_id(const ExperimentConfig& c) {
  return to_string(c.mode) + "_" + to_string(c.tag) + "_" + weighting_label(c.weighting) +
         "_seed" + std::to_string(c.seed);
}

void append_log(const ExperimentConfig& c, const std::string& line) {
  fs::create_directories(c.out_dir);
  std::ofstream log(fs::path(c.out_dir) / "log.txt", std::ios::app);
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%F %T", std::gmtime(&t));
  log << buf << " " << line << "\n";
}

void snapshot_config(const ExperimentConfig& c) {
  write_text_file(fs::path(c.out_dir) / "config.json", config_to_json_text(c));
}

LogBase base_from_string(const std::string& s) {
  if (s == "natural") return LogBase::natural;
  if (s == "base10") return LogBase::base10;
  throw ConfigError("unknown log_base: " + s);
}

fs::path dataset_dir(const ExperimentConfig& c, Tag tag) {
  return fs::path(c.out_dir) / "datasets" / to_string(c.mode) / to_string(tag);
}

double train_bias(const ScenarioDataset& ds) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ds.train.size(); ++i) {
    const double eps =
        ds.train.y[i] - eval_mms(ds.train.X(i, 0), Viscosity(ds.train.nu[i]), ds.log_base);
    acc += eps * eps;
  }
  return acc / static_cast<double>(ds.train.size());
}

}  // namespace

std::vector<double> required_viscosities(Mode mode) {
  if (mode == Mode::standard) return {kStandardNu};
  return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  try {
    ExperimentConfig c;
    if (j.contains("schema_version") && j["schema_version"].get<int>() != 1)
      throw ConfigError("unsupported config schema_version");
    if (j.contains("mode")) c.mode = mode_from_string(j["mode"].get<std::string>());
    if (j.contains("tag")) c.tag = tag_from_string(j["tag"].get<std::string>());
    if (j.contains("tags")) {
      c.tags.clear();
      for (const auto& t : j["tags"]) c.tags.push_back(tag_from_string(t.get<std::string>()));
    }
    if (j.contains("weighting")) {
      const auto& w = j["weighting"];
      const std::string kind = w.value("kind", "lbpinn");
      if (kind == "lbpinn") {
        c.weighting.kind = WeightingKind::lbpinn;
      } else if (kind == "fixed") {
        c.weighting.kind = WeightingKind::fixed;
        c.weighting.alpha = w.value("alpha", 0.5);
      } else {
        throw ConfigError("unknown weighting kind: " + kind);
      }
    }
    if (j.contains("arch")) {
      if (j["arch"].is_string()) {
        c.arch_preset = j["arch"].get<std::string>();
      } else {
        c.arch_preset = "custom";
        const int layers = j["arch"].value("hidden_layers", 4);
        const int width = j["arch"].value("width", 64);
        c.train.layer_sizes.assign(1, 0);  // input filled by resolve_config
        for (int i = 0; i < layers; ++i) c.train.layer_sizes.push_back(width);
        c.train.layer_sizes.push_back(1);
      }
    }
    if (j.contains("schedule")) {
      const auto& s = j["schedule"];
      c.schedule.warmup_epochs = s.value("warmup_epochs", c.schedule.warmup_epochs);
      c.schedule.adamw_epochs = s.value("adamw_epochs", c.schedule.adamw_epochs);
      c.schedule.lbfgs_epochs = s.value("lbfgs_epochs", c.schedule.lbfgs_epochs);
      c.schedule.batch_size = s.value("batch_size", c.schedule.batch_size);
      c.schedule.record_stride = s.value("record_stride", c.schedule.record_stride);
      c.schedule_overridden = true;
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      c.train.adamw.lr = t.value("lr", c.train.adamw.lr);
      c.train.adamw.weight_decay = t.value("weight_decay", c.train.adamw.weight_decay);
      c.train.adamw.beta1 = t.value("beta1", c.train.adamw.beta1);
      c.train.adamw.beta2 = t.value("beta2", c.train.adamw.beta2);
      c.train.adamw.eps = t.value("eps", c.train.adamw.eps);
      c.train.sigma_lr_scale = t.value("sigma_lr_scale", c.train.sigma_lr_scale);
      c.train.lbfgs.memory = t.value("lbfgs_memory", c.train.lbfgs.memory);
      c.train.lbfgs.c1 = t.value("lbfgs_c1", c.train.lbfgs.c1);
      c.train.lbfgs.c2 = t.value("lbfgs_c2", c.train.lbfgs.c2);
      c.train.lbfgs.max_line_trials =
          t.value("lbfgs_max_line_trials", c.train.lbfgs.max_line_trials);
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("log_base")) c.log_base = base_from_string(j["log_base"].get<std::string>());
    if (j.contains("fd")) {
      const auto& f = j["fd"];
      c.fd.cfl = f.value("cfl", c.fd.cfl);
      c.fd.tol = f.value("tol", c.fd.tol);
      c.fd.max_iters = f.value("max_iters", c.fd.max_iters);
    }
    if (j.contains("alphas")) c.alphas = j["alphas"].get<std::vector<double>>();
    if (j.contains("nu_grid_points")) c.nu_grid_points = j["nu_grid_points"].get<int>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    if (j.contains("checkpoint")) c.checkpoint = j["checkpoint"].get<std::string>();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError("config field error: " + std::string(e.what()));
  }
}

ExperimentConfig load_config_file(const fs::path& p) {
  return config_from_json_text(read_text_file(p));
}

std::string config_to_json_text(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = 1;
  j["mode"] = to_string(c.mode);
  j["tag"] = to_string(c.tag);
  {
    std::vector<std::string> tags;
    for (Tag t : c.tags) tags.push_back(to_string(t));
    j["tags"] = tags;
  }
  if (c.weighting.kind == WeightingKind::lbpinn) {
    j["weighting"] = {{"kind", "lbpinn"}};
  } else {
    j["weighting"] = {{"kind", "fixed"}, {"alpha", c.weighting.alpha}};
  }
  j["arch"] = c.arch_preset == "custom"
                  ? json({{"hidden_layers", static_cast<int>(c.train.layer_sizes.size()) - 2},
                          {"width", c.train.layer_sizes.size() > 2 ? c.train.layer_sizes[1] : 0}})
                  : json(c.arch_preset);
  j["schedule"] = {{"warmup_epochs", c.schedule.warmup_epochs},
                   {"adamw_epochs", c.schedule.adamw_epochs},
                   {"lbfgs_epochs", c.schedule.lbfgs_epochs},
                   {"batch_size", c.schedule.batch_size},
                   {"record_stride", c.schedule.record_stride}};
  j["train"] = {{"lr", c.train.adamw.lr},
                {"weight_decay", c.train.adamw.weight_decay},
                {"beta1", c.train.adamw.beta1},
                {"beta2", c.train.adamw.beta2},
                {"eps", c.train.adamw.eps},
                {"sigma_lr_scale", c.train.sigma_lr_scale},
                {"lbfgs_memory", c.train.lbfgs.memory},
                {"lbfgs_c1", c.train.lbfgs.c1},
                {"lbfgs_c2", c.train.lbfgs.c2},
                {"lbfgs_max_line_trials", c.train.lbfgs.max_line_trials}};
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["log_base"] = c.log_base == LogBase::natural ? "natural" : "base10";
  j["fd"] = {{"cfl", c.fd.cfl}, {"tol", c.fd.tol}, {"max_iters", c.fd.max_iters}};
  j["alphas"] = c.alphas;
  j["nu_grid_points"] = c.nu_grid_points;
  j["workers"] = c.workers;
  if (!c.checkpoint.empty()) j["checkpoint"] = c.checkpoint;
  return j.dump(1) + "\n";
}

void resolve_config(ExperimentConfig& c) {
  const int input_dim = c.mode == Mode::standard ? 1 : 2;
  if (c.arch_preset == "desk") {
    c.train.layer_sizes = {input_dim, 64, 64, 64, 64, 1};
  } else if (c.arch_preset == "paper") {
    c.train.layer_sizes = {input_dim, 200, 200, 200, 200, 200, 200, 200, 1};
  } else if (c.arch_preset == "custom") {
    if (c.train.layer_sizes.size() < 2) throw ConfigError("custom arch incomplete");
    c.train.layer_sizes.front() = input_dim;
  } else {
    throw ConfigError("unknown arch preset: " + c.arch_preset);
  }
  if (!c.schedule_overridden)
    c.schedule = c.mode == Mode::standard ? Schedule::standard_preset()
                                          : Schedule::parametric_preset();
  if (c.schedule.warmup_epochs < 0 || c.schedule.adamw_epochs < 0 ||
      c.schedule.lbfgs_epochs < 0 || c.schedule.batch_size < 1 ||
      c.schedule.record_stride < 1)
    throw ConfigError("invalid schedule");
  for (double a : c.alphas)
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alpha outside [0,1]");
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  if (c.nu_grid_points < 2) throw ConfigError("nu_grid_points must be >= 2");
  if (!(c.fd.cfl > 0.0 && c.fd.cfl < 1.0)) throw ConfigError("fd.cfl must be in (0,1)");
  if (!(c.fd.tol > 0.0)) throw ConfigError("fd.tol must be > 0");
}

int cmd_generate_data(const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  snapshot_config(c);

  struct Task {
    Tag tag;
    double nu;
    FdSolution solution;
    std::string error;
    bool failed = false;
  };
  std::vector<Task> tasks;
  for (Tag tag : c.tags) {
    if (tag == Tag::analytical) continue;
    for (double nu : required_viscosities(c.mode)) tasks.push_back({tag, nu, {}, "", false});
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next.fetch_add(1); k < tasks.size(); k = next.fetch_add(1)) {
      Task& task = tasks[k];
      try {
        const Mesh mesh = build_mesh(tag_mesh_nodes(task.tag));
        task.solution = solve_steady(mesh, Viscosity(task.nu), c.fd, c.log_base);
      } catch (const std::exception& e) {
        task.failed = true;
        task.error = e.what();
      }
    }
  };
  {
    const int n_threads =
        std::max(1, std::min<int>(c.workers, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  json summary;
  summary["schema_version"] = 1;
  summary["mode"] = to_string(c.mode);
  bool any_failed = false;

  for (Tag tag : c.tags) {
    const std::string tag_s = to_string(tag);
    FdSolutionSet fd;
    json solves = json::array();
    for (const auto& task : tasks) {
      if (task.tag != tag) continue;
      if (task.failed) {
        any_failed = true;
        solves.push_back({{"nu", task.nu}, {"status", "failed"}, {"error", task.error}});
        continue;
      }
      const auto& sol = task.solution;
      write_fd_solution_csv(fs::path(c.out_dir) / "fd" /
                                (tag_s + "_nu" + format_double(task.nu) + ".csv"),
                            sol);
      solves.push_back(
          {{"nu", task.nu},
           {"status", sol.status == SolveStatus::converged ? "converged"
                                                           : "stalled_at_roundoff"},
           {"iterations", sol.iterations},
           {"final_residual", sol.final_residual},
           {"rmse_vs_analytic", fd_rmse_vs_analytic(sol)}});
      fd.add(sol);
    }

    if (tag != Tag::analytical && solves.empty())
      continue;  // nothing generated for this tag

    if (tag != Tag::analytical) summary["solves"][tag_s] = solves;

    bool tag_failed = false;
    for (const auto& task : tasks)
      if (task.tag == tag && task.failed) tag_failed = true;
    if (tag_failed) {
      summary["datasets"][tag_s] = {{"status", "skipped:fd_solve_failed"}};
      continue;
    }

    const ScenarioDataset ds = build_scenario(c.mode, tag, fd, c.log_base);
    const fs::path dir = dataset_dir(c, tag);
    write_collocation_csv(dir / "collocation.csv", ds.collocation, c.mode, tag);
    write_labeled_csv(dir / "train.csv", ds.train, c.mode, tag, "train");
    write_labeled_csv(dir / "test.csv", ds.test, c.mode, tag, "test");
    write_labeled_csv(dir / "bc.csv", ds.bc, c.mode, tag, "bc");

    summary["datasets"][tag_s] = {{"status", "ok"},
                                  {"train_mean_eps2", train_bias(ds)},
                                  {"n_collocation", static_cast<int>(ds.collocation.size())},
                                  {"n_train", static_cast<int>(ds.train.size())},
                                  {"n_test", static_cast<int>(ds.test.size())},
                                  {"n_bc", static_cast<int>(ds.bc.size())}};
  }

  write_text_file(fs::path(c.out_dir) / "fd" / "summary.json", summary.dump(1) + "\n");
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  append_log(c, "generate-data mode=" + to_string(c.mode) +
                    " wall=" + std::to_string(wall) + "s" +
                    (any_failed ? " PARTIAL:some solves failed" : ""));
  return any_failed ? 5 : 0;
}

int cmd_train(const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  snapshot_config(c);

  const ScenarioDataset ds = load_dataset_csvs(dataset_dir(c, c.tag), c.mode, c.tag, c.log_base);
  const RunRecord rec = run_schedule(ds, c.schedule, c.seed, c.weighting, c.train);

  const fs::path run_dir = fs::path(c.out_dir) / "runs" / run_id(c);
  write_trace_csv(run_dir / "trace.csv", rec);
  save_checkpoint(run_dir / "checkpoint.json", rec, c.mode, c.log_base);

  // Final-quality metrics against the analytical field over the tag's nodes.
  NetParams net;
  net.layer_sizes = rec.layer_sizes;
  unflatten_params(rec.final_theta, net);
  const PredictFn predict = make_net_predictor(net, c.mode);
  const std::vector<double> nus =
      c.mode == Mode::standard ? std::vector<double>{kStandardNu} : ds.test_nus;
  const EvalReport ev = evaluate_vs_analytic(predict, c.tag, nus, c.log_base);
  double mean_rmse = 0.0;
  json per_nu = json::array();
  for (const auto& [nu, rmse] : ev.pinn_rmse_per_nu) {
    mean_rmse += rmse;
    per_nu.push_back({{"nu", nu}, {"rmse", rmse}});
  }
  mean_rmse /= static_cast<double>(ev.pinn_rmse_per_nu.size());

  json summary;
  summary["schema_version"] = 1;
  summary["run_id"] = run_id(c);
  summary["termination"] = rec.termination;
  summary["iterations"] = rec.iterations;
  summary["final"] = {{"l_pde", rec.final_losses.l_pde},
                      {"l_bc", rec.final_losses.l_bc},
                      {"l_d", rec.final_losses.l_d},
                      {"total", rec.final_losses.total},
                      {"sigma", rec.final_losses.sigma},
                      {"test_rmse", rec.final_test_rmse}};
  summary["rmse_vs_analytic"] = mean_rmse;
  summary["rmse_vs_analytic_per_nu"] = per_nu;
  write_text_file(run_dir / "summary.json", summary.dump(1) + "\n");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  append_log(c, "train " + run_id(c) + " wall=" + std::to_string(wall) + "s termination=" +
                    rec.termination);
  return 0;
}

int cmd_pareto(const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  snapshot_config(c);

  const ScenarioDataset ds = load_dataset_csvs(dataset_dir(c, c.tag), c.mode, c.tag, c.log_base);
  const ParetoSweepResult sweep = pareto_sweep(ds, c.alphas, c.schedule, c.seed, c.train,
                                               c.workers, /*include_lbpinn=*/true);

  const fs::path dir = fs::path(c.out_dir) / "pareto" / to_string(c.tag);
  write_pareto_trajectories_csv(dir / "trajectories.csv", sweep);
  write_pareto_front_csv(dir / "front.csv", sweep);

  json summary;
  summary["schema_version"] = 1;
  summary["tag"] = to_string(c.tag);
  json finals = json::array();
  for (const auto& run : sweep.runs)
    finals.push_back({{"alpha", run.label},
                      {"l_pde", run.final_point.l_pde},
                      {"l_d", run.final_point.l_d},
                      {"termination", run.record.termination}});
  summary["finals"] = finals;
  write_text_file(dir / "summary.json", summary.dump(1) + "\n");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  append_log(c, "pareto " + to_string(c.tag) + " wall=" + std::to_string(wall) + "s");
  return 0;
}

int cmd_evaluate(const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  snapshot_config(c);

  const fs::path ckpt_path = c.checkpoint.empty()
                                 ? fs::path(c.out_dir) / "runs" / run_id(c) / "checkpoint.json"
                                 : fs::path(c.checkpoint);
  const Checkpoint ckpt = load_checkpoint(ckpt_path);

  PredictFn predict;
  if (ckpt.mms_oracle) {
    predict = make_mms_predictor(c.log_base);
  } else {
    if (ckpt.mode != c.mode)
      throw ConfigError("checkpoint mode does not match config mode");
    const int want_dim = c.mode == Mode::standard ? 1 : 2;
    if (ckpt.layer_sizes.empty() || ckpt.layer_sizes.front() != want_dim)
      throw ConfigError("checkpoint architecture incompatible with mode");
    NetParams net;
    net.layer_sizes = ckpt.layer_sizes;
    if (ckpt.theta.size() != net.param_count())
      throw ConfigError("checkpoint parameter count mismatch");
    unflatten_params(ckpt.theta, net);
    predict = make_net_predictor(net, c.mode);
  }

  const ScenarioDataset ds = load_dataset_csvs(dataset_dir(c, c.tag), c.mode, c.tag, c.log_base);

  const std::vector<double> nu_grid = c.mode == Mode::standard
                                          ? std::vector<double>{kStandardNu}
                                          : log_nu_grid(c.nu_grid_points);
  EvalReport report = evaluate_vs_analytic(predict, c.tag, nu_grid, c.log_base);
  report.test_rmse = test_rmse(predict, ds);

  // Reference column: FD-vs-analytical RMSE from generated data.
  if (c.tag != Tag::analytical) {
    json fd_summary;
    try {
      fd_summary = json::parse(read_text_file(fs::path(c.out_dir) / "fd" / "summary.json"));
    } catch (const json::exception& e) {
      throw MissingInputError("fd/summary.json unreadable: " + std::string(e.what()));
    }
    const auto& solves = fd_summary.at("solves").at(to_string(c.tag));
    for (const auto& s : solves)
      if (s.value("status", "failed") != "failed")
        report.fd_rmse_per_nu.emplace_back(s["nu"].get<double>(),
                                           s["rmse_vs_analytic"].get<double>());
  }

  const fs::path dir = fs::path(c.out_dir) / "eval" / to_string(c.tag);
  json out;
  out["schema_version"] = 1;
  out["tag"] = to_string(c.tag);
  out["mode"] = to_string(c.mode);
  out["checkpoint"] = ckpt_path.string();
  out["test_rmse"] = report.test_rmse;
  json pinn = json::array(), fdref = json::array();
  for (const auto& [nu, rmse] : report.pinn_rmse_per_nu)
    pinn.push_back({{"nu", nu}, {"rmse", rmse}});
  for (const auto& [nu, rmse] : report.fd_rmse_per_nu)
    fdref.push_back({{"nu", nu}, {"rmse", rmse}});
  out["pinn_rmse_per_nu"] = pinn;
  out["fd_rmse_per_nu"] = fdref;
  write_text_file(dir / "report.json", out.dump(1) + "\n");

  std::string curve = "# schema: pinnlab.rmse_curve.v1\nnu,rmse\n";
  for (const auto& [nu, rmse] : report.pinn_rmse_per_nu)
    curve += format_double(nu) + "," + format_double(rmse) + "\n";
  write_text_file(dir / "pinn_rmse_per_nu.csv", curve);

  std::string ref = "# schema: pinnlab.rmse_curve.v1\nnu,rmse\n";
  for (const auto& [nu, rmse] : report.fd_rmse_per_nu)
    ref += format_double(nu) + "," + format_double(rmse) + "\n";
  write_text_file(dir / "fd_rmse_per_nu.csv", ref);

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  append_log(c, "evaluate " + to_string(c.tag) + " wall=" + std::to_string(wall) + "s");
  return 0;
}

int run_command(const std::string& name, const ExperimentConfig& c) {
  try {
    ExperimentConfig resolved = c;
    resolve_config(resolved);
    if (name == "generate-data") return cmd_generate_data(resolved);
    if (name == "train") return cmd_train(resolved);
    if (name == "pareto") return cmd_pareto(resolved);
    if (name == "evaluate") return cmd_evaluate(resolved);
    std::cerr << "unknown command: " << name << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const MissingInputError& e) {
    std::cerr << "missing input: " << e.what() << "\n";
    return 3;
  } catch (const NumericFault& e) {
    std::cerr << "numeric fault: " << e.what() << "\n";
    return 4;
  } catch (const DivergenceError& e) {
    std::cerr << "numeric fault: " << e.what() << "\n";
    return 4;
  } catch (const NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pinnlab
