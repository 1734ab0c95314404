#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

#include "pinnlab/errors.hpp"
#include "pinnlab/fdsolve.hpp"
#include "pinnlab/pareto.hpp"
#include "pinnlab/scenarios.hpp"
#include "pinnlab/trainer.hpp"

namespace pinnlab {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

void write_text_file(const std::filesystem::path& p, const std::string& content);
std::string read_text_file(const std::filesystem::path& p);

void write_fd_solution_csv(const std::filesystem::path& p, const FdSolution& sol);

void write_labeled_csv(const std::filesystem::path& p, const LabeledSet& set, Mode mode,
                       Tag tag, const char* point_class);
void write_collocation_csv(const std::filesystem::path& p, const CollocationSet& set,
                           Mode mode, Tag tag);

/// Reads back the four per-class CSVs written next to each other in dir.
/// Collocation sources are recomputed from the manufactured solution.
ScenarioDataset load_dataset_csvs(const std::filesystem::path& dir, Mode mode, Tag tag,
                                  LogBase base);

void write_trace_csv(const std::filesystem::path& p, const RunRecord& rec);
void write_pareto_trajectories_csv(const std::filesystem::path& p,
                                   const ParetoSweepResult& sweep);
void write_pareto_front_csv(const std::filesystem::path& p,
                            const ParetoSweepResult& sweep);

struct Checkpoint {
  bool mms_oracle = false;
  std::vector<int> layer_sizes;
  Eigen::VectorXd theta;
  std::array<double, 3> log_sigma{0.0, 0.0, 0.0};
  Mode mode = Mode::standard;
  LogBase log_base = LogBase::natural;
};

void save_checkpoint(const std::filesystem::path& p, const RunRecord& rec, Mode mode,
                     LogBase base);
Checkpoint load_checkpoint(const std::filesystem::path& p);

}  // namespace pinnlab
