#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pinnlab/errors.hpp"
#include "pinnlab/pareto.hpp"
#include "pinnlab/runio.hpp"

namespace pinnlab {

struct ExperimentConfig {
  Mode mode = Mode::standard;
  std::vector<Tag> tags = {Tag::C1, Tag::C2, Tag::C3, Tag::analytical};
  Tag tag = Tag::analytical;  // train / pareto / evaluate target
  Weighting weighting;        // lbpinn by default
  std::string arch_preset = "desk";  // desk | paper | custom
  TrainOptions train;
  Schedule schedule;
  bool schedule_overridden = false;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  LogBase log_base = LogBase::natural;
  SolveOptions fd;
  std::vector<double> alphas{std::begin(kDefaultAlphas), std::end(kDefaultAlphas)};
  int nu_grid_points = 25;
  int workers = 2;
  std::string checkpoint;  // evaluate input
};

/// Parses a config JSON file; CLI-style overrides are applied by the caller
/// before resolve_config.
ExperimentConfig load_config_file(const std::filesystem::path& p);
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& c);

/// Fills mode-dependent defaults (schedule preset, architecture layer sizes)
/// and validates. Throws ConfigError.
void resolve_config(ExperimentConfig& c);

/// The canonical viscosities a (mode, tag) pair needs FD solutions for.
std::vector<double> required_viscosities(Mode mode);

int cmd_generate_data(const ExperimentConfig& c);
int cmd_train(const ExperimentConfig& c);
int cmd_pareto(const ExperimentConfig& c);
int cmd_evaluate(const ExperimentConfig& c);

/// Maps exceptions from the commands onto the documented exit codes:
/// 0 ok, 2 bad config, 3 missing input, 4 numeric fault, 5 non-convergence.
int run_command(const std::string& name, const ExperimentConfig& c);

}  // namespace pinnlab
