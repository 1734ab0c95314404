// Command-line front end: dataset generation, training, Pareto sweeps and
// evaluation for the Burgers consistency-scenario laboratory.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pinnlab/experiment.hpp"

using namespace pinnlab;

int main(int argc, char** argv) {
  CLI::App app{"pinnlab: PINN data-consistency laboratory on steady Burgers"};
  app.require_subcommand(1);

  std::string config_path, out_dir, preset, tag, mode, checkpoint;
  std::int64_t seed = -1;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config JSON file");
    cmd->add_option("--seed", seed, "RNG seed override");
    cmd->add_option("--out", out_dir, "output directory override");
    cmd->add_option("--preset", preset, "architecture preset: desk|paper");
    cmd->add_option("--tag", tag, "scenario tag: C1|C2|C3|analytical");
    cmd->add_option("--mode", mode, "problem mode: standard|parametric");
  };

  CLI::App* gen = app.add_subcommand("generate-data",
                                     "run FD solves and write scenario datasets");
  CLI::App* train = app.add_subcommand("train", "train one (mode, tag) run");
  CLI::App* pareto = app.add_subcommand("pareto", "fixed-alpha sweep plus lbPINN overlay");
  CLI::App* eval = app.add_subcommand("evaluate", "evaluate a checkpoint");
  for (CLI::App* cmd : {gen, train, pareto, eval}) add_common(cmd);
  eval->add_option("--checkpoint", checkpoint, "checkpoint JSON path");

  CLI11_PARSE(app, argc, argv);

  ExperimentConfig config;
  try {
    if (!config_path.empty()) config = load_config_file(config_path);
    if (!mode.empty()) config.mode = mode_from_string(mode);
    if (!tag.empty()) {
      config.tag = tag_from_string(tag);
      config.tags = {config.tag};
    }
    if (!preset.empty()) config.arch_preset = preset;
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!checkpoint.empty()) config.checkpoint = checkpoint;
  } catch (const MissingInputError& e) {
    std::cerr << "missing input: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  return run_command(app.get_subcommands().front()->get_name(), config);
}
