#include "cdf/config.hpp"

#include <cctype>
#include <charconv>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace cdf {

namespace {

struct KeySpec {
  const char* name;
  const char* doc;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(d)) throw std::invalid_argument("not finite");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

std::string format_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

KeySpec dkey(const char* name, const char* doc, double Config::*f) {
  return {name, doc,
          [name, f](Config& c, const std::string& v) { c.*f = parse_double(name, v); },
          [f](const Config& c) { return format_double(c.*f); }};
}

KeySpec ikey(const char* name, const char* doc, int Config::*f) {
  return {name, doc,
          [name, f](Config& c, const std::string& v) {
            long long x = parse_int(name, v);
            if (x < INT_MIN || x > INT_MAX)
              throw ConfigError(std::string("key '") + name + "': out of range");
            c.*f = static_cast<int>(x);
          },
          [f](const Config& c) { return std::to_string(c.*f); }};
}

KeySpec ukey(const char* name, const char* doc, std::uint64_t Config::*f) {
  return {name, doc,
          [name, f](Config& c, const std::string& v) { c.*f = parse_u64(name, v); },
          [f](const Config& c) { return std::to_string(c.*f); }};
}

KeySpec bkey(const char* name, const char* doc, bool Config::*f) {
  return {name, doc,
          [name, f](Config& c, const std::string& v) { c.*f = parse_bool(name, v); },
          [f](const Config& c) { return c.*f ? "true" : "false"; }};
}

KeySpec skey(const char* name, const char* doc, std::string Config::*f) {
  return {name, doc, [f](Config& c, const std::string& v) { c.*f = v; },
          [f](const Config& c) { return c.*f; }};
}

const std::vector<KeySpec>& registry() {
  static const std::vector<KeySpec> keys = {
      skey("mode", "which planner(s) to run: cdf, reactive, or both", &Config::mode),
      ikey("episodes", "number of episodes per mode", &Config::episodes),
      ukey("seed", "base seed; episode i uses seed + i", &Config::seed),
      ikey("jobs", "worker threads for episode-level parallelism", &Config::jobs),
      bkey("paired_seeds", "reuse the cdf seeds for the reactive mode", &Config::paired_seeds),
      bkey("trace", "write a per-tick trajectory CSV for every episode", &Config::trace),
      dkey("episode_cap_s", "wall-clock cap inside the simulation; hitting it flags the episode anomalous", &Config::episode_cap_s),
      dkey("anomalous_exit_fraction", "exit code 2 when more than this fraction of episodes is anomalous", &Config::anomalous_exit_fraction),
      dkey("planner_rate_hz", "planner update rate; must equal the simulation rate", &Config::planner_rate_hz),
      dkey("sim_dt", "simulation step in seconds", &Config::sim_dt),
      dkey("p_left", "prior probability that the obstacle turns left", &Config::p_left),
      dkey("ego_start_ttc_min", "ego spawn distance, expressed as seconds to the conflict point at target speed (lower bound)", &Config::ego_start_ttc_min),
      dkey("ego_start_ttc_max", "upper bound of the ego spawn draw", &Config::ego_start_ttc_max),
      dkey("lane_width", "lane width in meters", &Config::lane_width),
      dkey("ego_approach_m", "through-road length east of the intersection", &Config::ego_approach_m),
      dkey("ego_depart_m", "through-road length west of the intersection", &Config::ego_depart_m),
      dkey("stem_approach_m", "stem length south of the road edge", &Config::stem_approach_m),
      dkey("turn_radius_m", "centerline radius of both turn arcs", &Config::turn_radius_m),
      dkey("stopline_setback_m", "stop line distance below the road edge", &Config::stopline_setback_m),
      dkey("waypoint_spacing_m", "maximum spacing of generated path waypoints", &Config::waypoint_spacing_m),
      dkey("wheelbase", "vehicle wheelbase in meters", &Config::wheelbase),
      dkey("vehicle_length", "bumper-to-bumper length", &Config::vehicle_length),
      dkey("vehicle_width", "body width", &Config::vehicle_width),
      dkey("rear_axle_offset", "rear axle to rear bumper", &Config::rear_axle_offset),
      dkey("max_accel", "acceleration limit, m/s^2", &Config::max_accel),
      dkey("max_brake", "braking limit, m/s^2", &Config::max_brake),
      dkey("max_steer", "steering angle limit, radians", &Config::max_steer),
      dkey("process_accel_std", "process noise std on realized acceleration", &Config::process_accel_std),
      dkey("process_steer_std", "process noise std on realized steering", &Config::process_steer_std),
      dkey("ego_target_speed", "ego cruise speed, m/s", &Config::ego_target_speed),
      dkey("obstacle_turn_speed", "obstacle speed through the turn arc", &Config::obstacle_turn_speed),
      dkey("obstacle_cruise_speed", "obstacle speed after the turn", &Config::obstacle_cruise_speed),
      dkey("obstacle_approach_speed", "obstacle speed cap while approaching the stop line", &Config::obstacle_approach_speed),
      dkey("lookahead_min", "pure pursuit minimum lookahead, m", &Config::lookahead_min),
      dkey("lookahead_gain", "pure pursuit lookahead per m/s of speed", &Config::lookahead_gain),
      dkey("comfort_decel", "routine (non-emergency) deceleration bound", &Config::comfort_decel),
      dkey("gap_threshold_s", "time gap the obstacle driver accepts when pulling out", &Config::gap_threshold_s),
      dkey("hold_min_s", "minimum dwell at the stop line before the gap decision", &Config::hold_min_s),
      dkey("pass_margin_m", "how far past the conflict point counts as passed", &Config::pass_margin_m),
      dkey("attention_beta", "per-tick probability the obstacle driver looks at the ego", &Config::attention_beta),
      dkey("obs_noise_pos", "observation noise std on x and y", &Config::obs_noise_pos),
      dkey("obs_noise_theta", "observation noise std on heading", &Config::obs_noise_theta),
      dkey("obs_noise_v", "observation noise std on speed", &Config::obs_noise_v),
      bkey("belief_extrapolate", "coast a stale belief forward at constant velocity", &Config::belief_extrapolate),
      ikey("particles", "particle count", &Config::particles),
      dkey("likelihood_sigma_pos", "measurement sigma on x and y, per vehicle", &Config::likelihood_sigma_pos),
      dkey("likelihood_sigma_theta", "measurement sigma on heading", &Config::likelihood_sigma_theta),
      dkey("likelihood_sigma_v", "measurement sigma on speed", &Config::likelihood_sigma_v),
      skey("resample", "resampling policy: always, or ess (resample when ESS drops)", &Config::resample),
      dkey("ess_fraction", "ess policy threshold as a fraction of the particle count", &Config::ess_fraction),
      bkey("generative_ego_in_filter", "particles plan ego control themselves instead of using the injected command", &Config::generative_ego_in_filter),
      dkey("imminent_threshold", "posterior mass needed to raise the alarm", &Config::imminent_threshold),
      dkey("imminent_horizon_s", "ignore danger mass while the true time to conflict exceeds this", &Config::imminent_horizon_s),
  };
  return keys;
}

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : registry()) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<ConfigKeyInfo> config_keys() {
  std::vector<ConfigKeyInfo> out;
  for (const auto& k : registry()) out.push_back({k.name, k.doc});
  return out;
}

void apply_override(Config& cfg, const std::string& key, const std::string& value) {
  const KeySpec* spec = find_key(key);
  if (spec == nullptr) throw ConfigError("unknown config key '" + key + "'");
  spec->set(cfg, value);
}

Config parse_config(const std::string& text, const std::string& source_name) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source_name + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(source_name + ":" + std::to_string(lineno) +
                        ": empty key or value");
    try {
      apply_override(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  validate_config(cfg);
  return cfg;
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

void validate_config(const Config& cfg) {
  std::vector<std::string> bad;
  auto require = [&bad](bool ok, const std::string& msg) {
    if (!ok) bad.push_back(msg);
  };

  require(cfg.mode == "cdf" || cfg.mode == "reactive" || cfg.mode == "both",
          "mode must be cdf, reactive, or both");
  require(cfg.episodes >= 1, "episodes must be >= 1");
  require(cfg.jobs >= 1, "jobs must be >= 1");
  require(cfg.episode_cap_s > 0.0, "episode_cap_s must be positive");
  require(cfg.anomalous_exit_fraction >= 0.0 && cfg.anomalous_exit_fraction <= 1.0,
          "anomalous_exit_fraction must lie in [0,1]");
  require(cfg.sim_dt > 0.0, "sim_dt must be positive");
  require(std::abs(cfg.planner_rate_hz * cfg.sim_dt - 1.0) < 1e-9,
          "planner_rate_hz must equal 1/sim_dt (the planner runs every simulation step)");
  require(cfg.p_left >= 0.0 && cfg.p_left <= 1.0, "p_left must lie in [0,1]");
  require(cfg.ego_start_ttc_min > 0.0, "ego_start_ttc_min must be positive");
  require(cfg.ego_start_ttc_max >= cfg.ego_start_ttc_min,
          "ego_start_ttc_max must be >= ego_start_ttc_min");

  require(cfg.lane_width > 0.0, "lane_width must be positive");
  require(cfg.ego_approach_m > 0.0, "ego_approach_m must be positive");
  require(cfg.ego_depart_m > 0.0, "ego_depart_m must be positive");
  require(cfg.stem_approach_m > 0.0, "stem_approach_m must be positive");
  require(cfg.turn_radius_m > 0.0, "turn_radius_m must be positive");
  require(cfg.stopline_setback_m >= 0.0, "stopline_setback_m must be >= 0");
  require(cfg.waypoint_spacing_m > 0.0 && cfg.waypoint_spacing_m <= 1.0,
          "waypoint_spacing_m must lie in (0,1]");

  require(cfg.wheelbase > 0.0, "wheelbase must be positive");
  require(cfg.vehicle_length > 0.0, "vehicle_length must be positive");
  require(cfg.vehicle_width > 0.0, "vehicle_width must be positive");
  require(cfg.rear_axle_offset >= 0.0 && cfg.rear_axle_offset <= cfg.vehicle_length,
          "rear_axle_offset must lie in [0, vehicle_length]");
  require(cfg.max_accel > 0.0, "max_accel must be positive");
  require(cfg.max_brake > 0.0, "max_brake must be positive");
  require(cfg.max_steer > 0.0 && cfg.max_steer < 1.5,
          "max_steer must lie in (0, 1.5) radians");
  require(cfg.process_accel_std >= 0.0, "process_accel_std must be >= 0");
  require(cfg.process_steer_std >= 0.0, "process_steer_std must be >= 0");

  require(cfg.ego_target_speed > 0.0, "ego_target_speed must be positive");
  require(cfg.obstacle_turn_speed > 0.0, "obstacle_turn_speed must be positive");
  require(cfg.obstacle_cruise_speed > 0.0, "obstacle_cruise_speed must be positive");
  require(cfg.obstacle_approach_speed > 0.0, "obstacle_approach_speed must be positive");
  require(cfg.lookahead_min > 0.0, "lookahead_min must be positive");
  require(cfg.lookahead_gain >= 0.0, "lookahead_gain must be >= 0");
  require(cfg.comfort_decel > 0.0, "comfort_decel must be positive");
  require(cfg.gap_threshold_s > 0.0, "gap_threshold_s must be positive");
  require(cfg.hold_min_s >= 0.0, "hold_min_s must be >= 0");
  require(cfg.pass_margin_m >= 0.0, "pass_margin_m must be >= 0");

  require(cfg.attention_beta >= 0.0 && cfg.attention_beta <= 1.0,
          "attention_beta must lie in [0,1]");
  require(cfg.obs_noise_pos >= 0.0, "obs_noise_pos must be >= 0");
  require(cfg.obs_noise_theta >= 0.0, "obs_noise_theta must be >= 0");
  require(cfg.obs_noise_v >= 0.0, "obs_noise_v must be >= 0");

  require(cfg.particles >= 1, "particles must be >= 1");
  require(cfg.likelihood_sigma_pos > 0.0, "likelihood_sigma_pos must be positive");
  require(cfg.likelihood_sigma_theta > 0.0, "likelihood_sigma_theta must be positive");
  require(cfg.likelihood_sigma_v > 0.0, "likelihood_sigma_v must be positive");
  require(cfg.resample == "always" || cfg.resample == "ess",
          "resample must be always or ess");
  require(cfg.ess_fraction > 0.0 && cfg.ess_fraction <= 1.0,
          "ess_fraction must lie in (0,1]");
  require(cfg.imminent_threshold > 0.0 && cfg.imminent_threshold < 1.0,
          "imminent_threshold must lie in (0,1)");
  require(cfg.imminent_horizon_s > 0.0, "imminent_horizon_s must be positive");

  if (!bad.empty()) {
    std::string msg = "invalid config:";
    for (const auto& m : bad) msg += "\n  - " + m;
    throw ConfigError(msg);
  }
}

std::string serialize_config(const Config& cfg) {
  std::string out;
  for (const auto& k : registry()) {
    out += k.name;
    out += " = ";
    out += k.get(cfg);
    out += "\n";
  }
  return out;
}

WorldConfig world_config(const Config& cfg) {
  WorldConfig w;
  w.lane_width = cfg.lane_width;
  w.ego_approach_m = cfg.ego_approach_m;
  w.ego_depart_m = cfg.ego_depart_m;
  w.stem_approach_m = cfg.stem_approach_m;
  w.turn_radius_m = cfg.turn_radius_m;
  w.stopline_setback_m = cfg.stopline_setback_m;
  w.waypoint_spacing_m = cfg.waypoint_spacing_m;
  return w;
}

SimParams sim_params(const Config& cfg) {
  SimParams sp;
  VehicleParams vp;
  vp.wheelbase = cfg.wheelbase;
  vp.footprint = Footprint{cfg.vehicle_length, cfg.vehicle_width, cfg.rear_axle_offset};
  vp.max_accel = cfg.max_accel;
  vp.max_brake = cfg.max_brake;
  vp.max_steer = cfg.max_steer;
  vp.noise_std = NoiseStd{cfg.process_accel_std, cfg.process_steer_std};
  sp.ego_vehicle = vp;
  sp.obstacle_vehicle = vp;

  sp.observation.beta = cfg.attention_beta;
  sp.observation.noise_std = {cfg.obs_noise_pos, cfg.obs_noise_pos,
                              cfg.obs_noise_theta, cfg.obs_noise_v};
  sp.observation.belief_extrapolate = cfg.belief_extrapolate;

  sp.behavior.ego_target_speed = cfg.ego_target_speed;
  sp.behavior.obstacle_turn_speed = cfg.obstacle_turn_speed;
  sp.behavior.obstacle_cruise_speed = cfg.obstacle_cruise_speed;
  sp.behavior.obstacle_approach_speed = cfg.obstacle_approach_speed;
  sp.behavior.lookahead_min = cfg.lookahead_min;
  sp.behavior.lookahead_gain = cfg.lookahead_gain;
  sp.behavior.comfort_decel = cfg.comfort_decel;
  sp.behavior.gap_threshold_s = cfg.gap_threshold_s;
  sp.behavior.hold_min_s = cfg.hold_min_s;
  sp.behavior.pass_margin_m = cfg.pass_margin_m;

  sp.dt = cfg.sim_dt;
  return sp;
}

InferenceParams inference_params(const Config& cfg) {
  InferenceParams ip;
  ip.n_particles = cfg.particles;
  ip.p_left = cfg.p_left;
  ip.likelihood.sigma_obstacle = {cfg.likelihood_sigma_pos, cfg.likelihood_sigma_pos,
                                  cfg.likelihood_sigma_theta, cfg.likelihood_sigma_v};
  ip.likelihood.sigma_ego = ip.likelihood.sigma_obstacle;
  ip.resample = cfg.resample == "ess" ? ResamplePolicy::Ess : ResamplePolicy::Always;
  ip.ess_fraction = cfg.ess_fraction;
  ip.generative_ego = cfg.generative_ego_in_filter;
  ip.imminent_threshold = cfg.imminent_threshold;
  ip.imminent_horizon_s = cfg.imminent_horizon_s;
  return ip;
}

}  // namespace cdf
