#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdf/inference.hpp"
#include "cdf/sim.hpp"
#include "cdf/world.hpp"

namespace cdf {

// Invalid configuration. The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every tunable of the experiment, flat so it round-trips through a
// key = value file. Defaults reproduce the reference experiment.
struct Config {
  // experiment
  std::string mode = "cdf";  // cdf | reactive | both
  int episodes = 1000;
  std::uint64_t seed = 12345;
  int jobs = 1;
  bool paired_seeds = false;
  bool trace = false;
  double episode_cap_s = 60.0;
  double anomalous_exit_fraction = 0.01;
  double planner_rate_hz = 10.0;

  // scenario
  double sim_dt = 0.1;
  double p_left = 0.75;
  double ego_start_ttc_min = 4.1;
  double ego_start_ttc_max = 4.5;

  // world
  double lane_width = 3.5;
  double ego_approach_m = 120.0;
  double ego_depart_m = 40.0;
  double stem_approach_m = 40.0;
  double turn_radius_m = 6.0;
  double stopline_setback_m = 0.75;
  double waypoint_spacing_m = 0.5;

  // vehicles (both vehicles share one parameter set)
  double wheelbase = 2.7;
  double vehicle_length = 4.5;
  double vehicle_width = 1.8;
  double rear_axle_offset = 1.0;
  double max_accel = 2.0;
  double max_brake = 4.877;
  double max_steer = 0.55;
  double process_accel_std = 0.3;
  double process_steer_std = 0.02;

  // behavior
  double ego_target_speed = 13.4;
  double obstacle_turn_speed = 5.0;
  double obstacle_cruise_speed = 13.4;
  double obstacle_approach_speed = 7.0;
  double lookahead_min = 3.0;
  double lookahead_gain = 0.8;
  double comfort_decel = 2.0;
  double gap_threshold_s = 4.0;
  double hold_min_s = 1.1;
  double pass_margin_m = 6.0;

  // observation
  double attention_beta = 0.05;
  double obs_noise_pos = 0.5;
  double obs_noise_theta = 0.05;
  double obs_noise_v = 0.5;
  bool belief_extrapolate = true;

  // filter
  int particles = 1000;
  double likelihood_sigma_pos = 0.3;
  double likelihood_sigma_theta = 0.05;
  double likelihood_sigma_v = 0.3;
  std::string resample = "always";  // always | ess
  double ess_fraction = 0.5;
  bool generative_ego_in_filter = false;
  double imminent_threshold = 0.75;
  double imminent_horizon_s = 6.0;
};

// Known keys in canonical order, with one-line documentation.
struct ConfigKeyInfo {
  std::string name;
  std::string doc;
};
std::vector<ConfigKeyInfo> config_keys();

// Parses "key = value" lines; '#' starts a comment, blank lines are skipped.
// Unknown keys, malformed lines, and type errors throw ConfigError. The
// result is validated before it is returned.
Config parse_config(const std::string& text, const std::string& source_name);
Config load_config_file(const std::string& path);

// Sets one key from its text form; used by CLI overrides. Does not validate.
void apply_override(Config& cfg, const std::string& key, const std::string& value);

// Cross-field validation; throws ConfigError listing every violation.
void validate_config(const Config& cfg);

// Canonical text form: every key in registry order, values at full precision.
// parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const Config& cfg);

// Builders for the runtime parameter structs.
WorldConfig world_config(const Config& cfg);
SimParams sim_params(const Config& cfg);
InferenceParams inference_params(const Config& cfg);

}  // namespace cdf
