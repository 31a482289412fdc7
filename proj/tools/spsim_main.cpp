#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spsim/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Single-ion cavity QED photon source: simulation and photon statistics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string mode_override;
  std::uint64_t seed_override = 0;
  bool seed_set = false, paper_scale = false, debug_origins = false;

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    cmd->add_option_function<std::uint64_t>(
           "--seed", [&](std::uint64_t v) { seed_override = v; seed_set = true; },
           "override run.master_seed");
    cmd->add_option("--mode", mode_override,
                    "override mode (master_equation|trajectory|analyze_only|dark_level_study)");
    if (with_out) cmd->add_option("--out", out_dir, "output directory");
    cmd->add_flag("--paper-scale", paper_scale,
                  "resample the trajectory pool up to run.paper_scale_trials periods");
    cmd->add_flag("--debug-origins", debug_origins,
                  "export click origin tags as a third time-tag column");
  };

  auto* cmd_run = app.add_subcommand("run", "run the configured pipeline");
  add_common(cmd_run, true);
  auto* cmd_analyze = app.add_subcommand("analyze", "photon statistics of a time-tag file");
  add_common(cmd_analyze, true);
  auto* cmd_figures = app.add_subcommand("figures", "write plot scripts for a bundle");
  cmd_figures->add_option("--out", out_dir, "bundle directory")->required();
  auto* cmd_validate = app.add_subcommand("validate-config", "parse, validate and echo a config");
  cmd_validate->add_option("--config", config_path, "experiment config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_figures->parsed()) {
      for (const auto& f : spsim::emit_figures(out_dir)) std::cout << f << "\n";
      return 0;
    }

    spsim::ExperimentConfig config = spsim::load_config(config_path);
    if (seed_set) config.run.master_seed = seed_override;
    if (!mode_override.empty()) {
      if (mode_override == "master_equation") config.mode = spsim::RunMode::MasterEquation;
      else if (mode_override == "trajectory") config.mode = spsim::RunMode::Trajectory;
      else if (mode_override == "analyze_only") config.mode = spsim::RunMode::AnalyzeOnly;
      else if (mode_override == "dark_level_study") config.mode = spsim::RunMode::DarkLevelStudy;
      else throw std::invalid_argument("unknown --mode: " + mode_override);
    }
    if (cmd_analyze->parsed()) config.mode = spsim::RunMode::AnalyzeOnly;
    if (config.mode == spsim::RunMode::AnalyzeOnly && config.input_timetags.empty())
      throw std::invalid_argument("analyze_only mode requires 'input_timetags' in the config");

    if (cmd_validate->parsed()) {
      std::cout << spsim::serialize_config(config);
      return 0;
    }

    spsim::RunFlags flags;
    flags.paper_scale = paper_scale;
    flags.debug_origins = debug_origins;
    const auto result = spsim::run(config, out_dir, flags);
    for (const auto& [k, v] : result.summary) std::cout << k << " = " << v << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
