#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdf/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-vehicle T-intersection experiments: intent/belief inference vs a reactive baseline"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment and write reports");
  std::string config_path;
  run->add_option("--config", config_path, "Config file (key = value lines)")
      ->check(CLI::ExistingFile);
  std::vector<std::string> modes;
  run->add_option("--mode", modes, "Planner mode, repeatable: cdf or reactive")
      ->check(CLI::IsMember({"cdf", "reactive"}));
  int episodes = 0;
  auto* episodes_opt = run->add_option("--episodes", episodes, "Episodes per mode");
  std::uint64_t seed = 0;
  auto* seed_opt = run->add_option("--seed", seed, "Base seed");
  int jobs = 0;
  auto* jobs_opt = run->add_option("--jobs", jobs, "Worker threads");
  bool trace = false;
  run->add_flag("--trace", trace, "Write per-episode trajectory CSVs");
  bool paired = false;
  run->add_flag("--paired-seeds", paired, "Reuse the cdf seeds for the reactive mode");
  std::string run_out = cdf::default_out_dir();
  run->add_option("--out", run_out, "Output directory (default: $CDFSIM_OUT or ./out)");

  auto* replay = app.add_subcommand("replay", "Re-simulate one logged episode with a full trace");
  std::string episodes_csv;
  replay->add_option("episodes_csv", episodes_csv, "episodes.csv from a previous run")
      ->required();
  std::uint64_t replay_seed = 0;
  replay->add_option("--seed", replay_seed, "Episode seed to replay")->required();
  std::string replay_mode;
  auto* replay_mode_opt =
      replay->add_option("--mode", replay_mode, "Pick the row of this mode")
          ->check(CLI::IsMember({"cdf", "reactive"}));
  bool counterfactual = false;
  replay->add_flag("--counterfactual", counterfactual,
                   "Replay with every intervention disabled");
  std::string replay_out = cdf::default_out_dir();
  replay->add_option("--out", replay_out, "Output directory (default: $CDFSIM_OUT or ./out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (run->parsed()) {
    cdf::RunOptions opts;
    if (!config_path.empty()) opts.config_path = config_path;
    if (!modes.empty()) {
      bool has_cdf = false;
      bool has_reactive = false;
      for (const auto& m : modes) (m == "cdf" ? has_cdf : has_reactive) = true;
      opts.overrides.emplace_back(
          "mode", has_cdf && has_reactive ? "both" : (has_cdf ? "cdf" : "reactive"));
    }
    if (*episodes_opt) opts.overrides.emplace_back("episodes", std::to_string(episodes));
    if (*seed_opt) opts.overrides.emplace_back("seed", std::to_string(seed));
    if (*jobs_opt) opts.overrides.emplace_back("jobs", std::to_string(jobs));
    if (trace) opts.overrides.emplace_back("trace", "true");
    if (paired) opts.overrides.emplace_back("paired_seeds", "true");
    opts.out_dir = run_out;
    return cdf::cmd_run(opts, std::cout, std::cerr);
  }

  cdf::ReplayOptions opts;
  opts.episodes_csv_path = episodes_csv;
  opts.seed = replay_seed;
  if (*replay_mode_opt) opts.mode = replay_mode;
  opts.counterfactual = counterfactual;
  opts.out_dir = replay_out;
  return cdf::cmd_replay(opts, std::cout, std::cerr);
}
