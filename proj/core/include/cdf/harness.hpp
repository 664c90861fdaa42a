#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdf/config.hpp"
#include "cdf/inference.hpp"

namespace cdf {

enum class Mode { Cdf, Reactive };
const char* to_string(Mode mode);

// Ground truth of an episode (from the counterfactual replay) and the label
// the planner side predicted.
enum class ScenarioLabel { Cutoff, Yield, Right };
const char* to_string(ScenarioLabel label);

struct TraceRow {
  double t = 0.0;
  VehiclePose obstacle{};
  VehiclePose ego{};
  bool observed = false;
  std::optional<VehiclePose> believed{};
  ControlInput obstacle_u{};
  ControlInput ego_u{};
  YieldState yield_state = YieldState::Approaching;
  double p_left = 0.0;
  double p_right = 0.0;
  double p_imminent = 0.0;
  bool braking = false;
  double gap = 0.0;
};

struct EpisodeResult {
  std::uint64_t seed = 0;
  Mode mode = Mode::Cdf;
  Intent true_intent = Intent::TurnLeft;
  ScenarioLabel scenario_label = ScenarioLabel::Right;
  ScenarioLabel predicted_label = ScenarioLabel::Right;
  std::optional<double> alarm_time{};
  bool collision = false;
  double min_gap = 0.0;
  std::string termination;  // collision | ego_exit | cap
  double termination_time = 0.0;
  double final_p_left = 0.0;
  bool anomalous = false;
  std::vector<TraceRow> trace;  // populated when requested
};

struct EpisodeOptions {
  // Disables every intervention (and the filter): the ego just keeps driving
  // at its target speed. Used for ground-truth labeling and for inspection.
  bool counterfactual = false;
  bool keep_trace = false;
  std::optional<Intent> forced_intent{};  // replaces the drawn intent; the draw still happens
};

// Cutoff iff the alarm fired; otherwise the final MAP intent maps
// TurnLeft -> Yield and TurnRight -> Right.
ScenarioLabel classify_prediction(bool alarm_fired, Intent map_intent);

// Simulates one episode. The world and the filter consume independent rng
// substreams of episode_seed, so a counterfactual replay of the same seed is
// bit-identical to the primary run up to the first intervention tick.
EpisodeResult run_episode(const Config& cfg, const WorldMap& world, Mode mode,
                          std::uint64_t episode_seed, const EpisodeOptions& opts = {});

struct ModeSummary {
  Mode mode = Mode::Cdf;
  int episodes = 0;
  // confusion[scenario][prediction], both indexed Cutoff, Yield, Right.
  std::array<std::array<int, 3>, 3> confusion{};
  int collisions_imminent = 0;  // episodes whose counterfactual collides
  int collisions_occurred = 0;  // collisions in the primary runs
  int anomalous = 0;
  std::vector<EpisodeResult> results;  // ordered by episode index
};

// Fraction of imminent collisions avoided, in percent; 100 when none were
// imminent.
double percent_avoided(const ModeSummary& s);

// Runs cfg.episodes episodes with seeds base_seed + i, optionally across
// cfg.jobs worker threads. Aggregation happens in index order afterwards, so
// the result does not depend on the number of workers.
ModeSummary run_experiment(const Config& cfg, const WorldMap& world, Mode mode,
                           std::uint64_t base_seed);

}  // namespace cdf
