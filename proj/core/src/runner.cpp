#include "cdf/runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cdf/report.hpp"

namespace cdf {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> modes_of(const Config& cfg) {
  if (cfg.mode == "both") return {"cdf", "reactive"};
  return {cfg.mode};
}

}  // namespace

std::string default_out_dir() {
  const char* env = std::getenv("CDFSIM_OUT");
  if (env != nullptr && env[0] != '\0') return env;
  return "out";
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  Config cfg;
  try {
    if (opts.config_path) cfg = load_config_file(*opts.config_path);
    for (const auto& [key, value] : opts.overrides) apply_override(cfg, key, value);
    validate_config(cfg);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);

    const std::vector<std::string> modes = modes_of(cfg);
    std::vector<std::string> outputs = {"episodes.csv", "confusion.csv", "summary.json"};
    if (cfg.trace) outputs.push_back("traces/");
    const std::string created = utc_timestamp();
    write_file(dir / "manifest.json",
               manifest_json(cfg, modes, opts.out_dir, outputs, created, std::nullopt));

    const WorldMap world = build_t_intersection(world_config(cfg));

    std::vector<ModeSummary> summaries;
    for (const std::string& name : modes) {
      const Mode mode = name == "cdf" ? Mode::Cdf : Mode::Reactive;
      std::uint64_t base = cfg.seed;
      if (mode == Mode::Reactive && !cfg.paired_seeds)
        base += static_cast<std::uint64_t>(cfg.episodes);
      summaries.push_back(run_experiment(cfg, world, mode, base));
    }

    std::vector<const ModeSummary*> views;
    for (const auto& s : summaries) views.push_back(&s);

    write_file(dir / "episodes.csv", episodes_csv(views));
    write_file(dir / "confusion.csv", confusion_csv(views));

    std::optional<PairedComparison> paired;
    if (cfg.paired_seeds && summaries.size() == 2)
      paired = pair_modes(summaries[0], summaries[1]);
    write_file(dir / "summary.json", summary_json(views, paired));

    if (cfg.trace) {
      fs::create_directories(dir / "traces");
      for (const auto& s : summaries) {
        for (const auto& r : s.results) {
          const std::string name = "trace_" + std::string(to_string(r.mode)) + "_" +
                                   std::to_string(r.seed) + ".csv";
          write_file(dir / "traces" / name, trace_csv(r));
        }
      }
    }

    write_file(dir / "manifest.json",
               manifest_json(cfg, modes, opts.out_dir, outputs, created, utc_timestamp()));

    int total_anomalous = 0;
    int total_episodes = 0;
    for (const auto& s : summaries) {
      total_anomalous += s.anomalous;
      total_episodes += s.episodes;
      out << to_string(s.mode) << ": episodes=" << s.episodes
          << " imminent=" << s.collisions_imminent
          << " occurred=" << s.collisions_occurred
          << " percent_avoided=" << std::llround(percent_avoided(s))
          << " anomalous=" << s.anomalous << "\n";
    }
    const double frac = total_episodes > 0
                            ? static_cast<double>(total_anomalous) / total_episodes
                            : 0.0;
    if (frac > cfg.anomalous_exit_fraction) {
      err << "error: " << total_anomalous << " of " << total_episodes
          << " episodes were anomalous (threshold "
          << cfg.anomalous_exit_fraction << ")\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_replay(const ReplayOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(opts.episodes_csv_path);
    if (!in) {
      err << "error: cannot open '" << opts.episodes_csv_path << "'\n";
      return 1;
    }

    std::string header;
    if (!std::getline(in, header)) {
      err << "error: '" << opts.episodes_csv_path << "' is empty\n";
      return 1;
    }
    const auto cols = split_csv_line(header);
    auto col = [&cols](const std::string& name) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == name) return i;
      }
      throw std::runtime_error("episodes csv has no '" + name + "' column");
    };
    const std::size_t seed_col = col("seed");
    const std::size_t mode_col = col("mode");
    const std::size_t scenario_col = col("scenario_label");

    std::optional<std::string> logged_mode;
    std::optional<std::string> logged_scenario;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto fields = split_csv_line(line);
      if (fields.size() <= std::max({seed_col, mode_col, scenario_col})) continue;
      if (fields[seed_col] != std::to_string(opts.seed)) continue;
      if (opts.mode && fields[mode_col] != *opts.mode) continue;
      logged_mode = fields[mode_col];
      logged_scenario = fields[scenario_col];
      break;
    }
    if (!logged_mode) {
      err << "error: seed " << opts.seed << " not found in '"
          << opts.episodes_csv_path << "'\n";
      return 1;
    }

    const fs::path manifest_path =
        fs::path(opts.episodes_csv_path).parent_path() / "manifest.json";
    std::ifstream mf(manifest_path);
    if (!mf) {
      err << "error: cannot open '" << manifest_path.string() << "'\n";
      return 1;
    }
    nlohmann::json manifest = nlohmann::json::parse(mf);
    const Config cfg =
        parse_config(manifest.at("config_text").get<std::string>(), "manifest config");

    const WorldMap world = build_t_intersection(world_config(cfg));
    const Mode mode = *logged_mode == "cdf" ? Mode::Cdf : Mode::Reactive;
    EpisodeOptions eo;
    eo.keep_trace = true;
    eo.counterfactual = opts.counterfactual;
    const EpisodeResult r = run_episode(cfg, world, mode, opts.seed, eo);

    fs::create_directories(opts.out_dir);
    const std::string name = std::string("replay_") + to_string(mode) + "_" +
                             std::to_string(opts.seed) +
                             (opts.counterfactual ? "_counterfactual" : "") + ".csv";
    write_file(fs::path(opts.out_dir) / name, trace_csv(r));

    out << "seed=" << r.seed << " mode=" << to_string(mode)
        << " counterfactual=" << (opts.counterfactual ? 1 : 0)
        << " scenario_label=" << to_string(r.scenario_label)
        << " predicted_label=" << to_string(r.predicted_label)
        << " collision=" << (r.collision ? 1 : 0)
        << " min_gap=" << format_g9(r.min_gap)
        << " termination=" << r.termination
        << " termination_time=" << format_g9(r.termination_time)
        << " rows=" << r.trace.size() << " trace=" << name << "\n";
    if (*logged_scenario != to_string(r.scenario_label)) {
      err << "warning: replay scenario_label " << to_string(r.scenario_label)
          << " differs from logged " << *logged_scenario << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cdf
