#include "pinnlab/runio.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pinnlab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{})
    throw std::invalid_argument("parse_double: bad value '" + std::string(s) + "'");
  return v;
}

void write_text_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for write: " + p.string());
  out << content;
}

std::string read_text_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw MissingInputError("missing input file: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

// Data rows of a schema-headed CSV (comment lines start with '#').
std::vector<std::vector<std::string>> read_csv_rows(const fs::path& p,
                                                    const std::string& expect_schema) {
  std::istringstream in(read_text_file(p));
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool schema_ok = false, header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find(expect_schema) != std::string::npos) schema_ok = true;
      continue;
    }
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    rows.push_back(split_csv_line(line));
  }
  if (!schema_ok)
    throw MissingInputError("file " + p.string() + " lacks schema marker " +
                            expect_schema);
  return rows;
}

const char* log_base_name(LogBase b) {
  return b == LogBase::natural ? "natural" : "base10";
}

}  // namespace

void write_fd_solution_csv(const fs::path& p, const FdSolution& sol) {
  std::string s;
  s += "# schema: pinnlab.fd_solution.v1\n";
  s += "# nu=" + format_double(sol.nu) + " n_nodes=" + std::to_string(sol.mesh.n_nodes) +
       " log_base=" + log_base_name(sol.log_base) +
       " iterations=" + std::to_string(sol.iterations) +
       " final_residual=" + format_double(sol.final_residual) + " status=" +
       (sol.status == SolveStatus::converged ? "converged" : "stalled_at_roundoff") +
       "\n";
  s += "x,u_numeric,u_analytic,epsilon\n";
  for (int i = 0; i < sol.mesh.n_nodes; ++i) {
    const double exact = eval_mms(sol.mesh.nodes[i], Viscosity(sol.nu), sol.log_base);
    s += format_double(sol.mesh.nodes[i]) + "," + format_double(sol.values[i]) + "," +
         format_double(exact) + "," + format_double(sol.values[i] - exact) + "\n";
  }
  write_text_file(p, s);
}

void write_labeled_csv(const fs::path& p, const LabeledSet& set, Mode mode, Tag tag,
                       const char* point_class) {
  std::string s;
  s += "# schema: pinnlab.points.v1 class=";
  s += point_class;
  s += "\n";
  s += "x,scaled_nu,nu,label,source_tag\n";
  const std::string tag_s = to_string(tag);
  for (Eigen::Index i = 0; i < set.size(); ++i) {
    const double eta = mode == Mode::parametric ? set.X(i, 1) : scale_viscosity(set.nu[i]);
    s += format_double(set.X(i, 0)) + "," + format_double(eta) + "," +
         format_double(set.nu[i]) + "," + format_double(set.y[i]) + "," + tag_s + "\n";
  }
  write_text_file(p, s);
}

void write_collocation_csv(const fs::path& p, const CollocationSet& set, Mode mode,
                           Tag tag) {
  std::string s;
  s += "# schema: pinnlab.points.v1 class=collocation\n";
  s += "x,scaled_nu,nu,label,source_tag\n";
  const std::string tag_s = to_string(tag);
  for (Eigen::Index i = 0; i < set.size(); ++i) {
    const double eta = mode == Mode::parametric ? set.X(i, 1) : scale_viscosity(set.nu[i]);
    s += format_double(set.X(i, 0)) + "," + format_double(eta) + "," +
         format_double(set.nu[i]) + ",," + tag_s + "\n";
  }
  write_text_file(p, s);
}

ScenarioDataset load_dataset_csvs(const fs::path& dir, Mode mode, Tag tag,
                                  LogBase base) {
  ScenarioDataset ds;
  ds.mode = mode;
  ds.tag = tag;
  ds.log_base = base;
  const int dim = ds.input_dim();

  const auto load_labeled = [&](const char* name, LabeledSet& set, bool labels) {
    const auto rows = read_csv_rows(dir / (std::string(name) + ".csv"), "pinnlab.points.v1");
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    set.X.resize(n, dim);
    set.nu.resize(n);
    set.y.resize(labels ? n : 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& r = rows[i];
      if (r.size() != 5)
        throw MissingInputError(std::string("malformed row in ") + name + ".csv");
      set.X(i, 0) = parse_double(r[0]);
      if (dim == 2) set.X(i, 1) = parse_double(r[1]);
      set.nu[i] = parse_double(r[2]);
      if (labels) set.y[i] = parse_double(r[3]);
    }
  };

  LabeledSet colloc_points;
  load_labeled("collocation", colloc_points, false);
  ds.collocation.X = colloc_points.X;
  ds.collocation.nu = colloc_points.nu;
  ds.collocation.source.resize(colloc_points.X.rows());
  for (Eigen::Index i = 0; i < ds.collocation.source.size(); ++i)
    ds.collocation.source[i] =
        eval_mms_derivs(ds.collocation.X(i, 0), Viscosity(ds.collocation.nu[i]), base)
            .source;

  load_labeled("train", ds.train, true);
  load_labeled("test", ds.test, true);
  load_labeled("bc", ds.bc, true);

  const auto collect_nus = [](const LabeledSet& set) {
    std::vector<double> nus;
    for (Eigen::Index i = 0; i < set.size(); ++i)
      if (std::find(nus.begin(), nus.end(), set.nu[i]) == nus.end())
        nus.push_back(set.nu[i]);
    return nus;
  };
  ds.train_nus = collect_nus(ds.train);
  ds.test_nus = collect_nus(ds.test);
  return ds;
}

void write_trace_csv(const fs::path& p, const RunRecord& rec) {
  std::string s;
  s += "# schema: pinnlab.trace.v1\n";
  s += "iter,phase,l_pde,l_bc,l_d,sigma_pde,sigma_bc,sigma_d,test_rmse\n";
  for (const auto& row : rec.trace) {
    s += std::to_string(row.iter) + "," + row.phase + "," + format_double(row.l_pde) +
         "," + format_double(row.l_bc) + "," + format_double(row.l_d) + "," +
         format_double(row.sigma_pde) + "," + format_double(row.sigma_bc) + "," +
         format_double(row.sigma_d) + "," + format_double(row.test_rmse) + "\n";
  }
  write_text_file(p, s);
}

void write_pareto_trajectories_csv(const fs::path& p, const ParetoSweepResult& sweep) {
  std::string s;
  s += "# schema: pinnlab.pareto_trajectories.v1\n";
  s += "alpha,iter,l_pde,l_d,is_final\n";
  for (const auto& run : sweep.runs) {
    for (size_t i = 0; i < run.record.trace.size(); ++i) {
      const auto& row = run.record.trace[i];
      const bool is_final = i + 1 == run.record.trace.size();
      s += run.label + "," + std::to_string(row.iter) + "," + format_double(row.l_pde) +
           "," + format_double(row.l_d) + "," + (is_final ? "1" : "0") + "\n";
    }
  }
  write_text_file(p, s);
}

void write_pareto_front_csv(const fs::path& p, const ParetoSweepResult& sweep) {
  std::string s;
  s += "# schema: pinnlab.pareto_front.v1\n";
  s += "alpha,l_pde,l_d\n";
  for (std::size_t idx : sweep.front) {
    const auto& run = sweep.runs[idx];
    s += run.label + "," + format_double(run.final_point.l_pde) + "," +
         format_double(run.final_point.l_d) + "\n";
  }
  write_text_file(p, s);
}

void save_checkpoint(const fs::path& p, const RunRecord& rec, Mode mode, LogBase base) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "net";
  j["mode"] = to_string(mode);
  j["log_base"] = log_base_name(base);
  j["layer_sizes"] = rec.layer_sizes;
  std::vector<double> theta(rec.final_theta.data(),
                            rec.final_theta.data() + rec.final_theta.size());
  j["params"] = theta;
  j["log_sigma"] = rec.final_log_sigma;
  write_text_file(p, j.dump(1) + "\n");
}

Checkpoint load_checkpoint(const fs::path& p) {
  json j;
  try {
    j = json::parse(read_text_file(p));
  } catch (const json::exception& e) {
    throw ConfigError("checkpoint parse error: " + std::string(e.what()));
  }
  Checkpoint c;
  const std::string kind = j.value("kind", "net");
  c.mode = mode_from_string(j.value("mode", "standard"));
  c.log_base = j.value("log_base", "natural") == std::string("base10")
                   ? LogBase::base10
                   : LogBase::natural;
  if (kind == "mms_oracle") {
    c.mms_oracle = true;
    return c;
  }
  if (kind != "net") throw ConfigError("checkpoint: unknown kind " + kind);
  c.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  const auto params = j.at("params").get<std::vector<double>>();
  c.theta = Eigen::Map<const Eigen::VectorXd>(params.data(),
                                              static_cast<Eigen::Index>(params.size()));
  if (j.contains("log_sigma")) {
    const auto ls = j["log_sigma"].get<std::vector<double>>();
    for (size_t i = 0; i < 3 && i < ls.size(); ++i) c.log_sigma[i] = ls[i];
  }
  return c;
}

}  // namespace pinnlab
