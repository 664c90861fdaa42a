// End-to-end checks of the experiment-level guarantees. Each criterion prints
// one PASS/FAIL line; the process exits nonzero when any of them fail. The
// expensive pair of 1000-episode experiments runs once and feeds the first
// three criteria.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cdf/config.hpp"
#include "cdf/harness.hpp"
#include "cdf/inference.hpp"
#include "cdf/report.hpp"
#include "cdf/sim.hpp"

using namespace cdf;

namespace {

bool g_all_ok = true;

void verdict(const char* name, bool ok, const std::string& detail) {
  std::printf("%-38s %s  %s\n", name, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) g_all_ok = false;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// An episode start: obstacle held at the stop line, ego ttc seconds out.
AgentsState spawn(const WorldMap& world, Intent intent, double ttc, const SimParams& sp) {
  const Path& opath = world.path(intent);
  const Path& epath = world.ego_path();
  const auto conflict = world.conflict(Intent::TurnLeft);
  const double s_hold = hold_stop_s(opath, sp.obstacle_vehicle.footprint);
  const Vec2 op = opath.line.point_at(s_hold);
  const double s_ego = conflict->s_on_ego_path - sp.behavior.ego_target_speed * ttc;
  const Vec2 ep = epath.line.point_at(s_ego);

  AgentsState st;
  st.pose.obstacle = {op.x, op.y, opath.line.heading_at(s_hold), 0.0};
  st.pose.ego = {ep.x, ep.y, epath.line.heading_at(s_ego), sp.behavior.ego_target_speed};
  st.obstacle_ctrl.intent = intent;
  st.obstacle_ctrl.yield_state = YieldState::Approaching;
  st.obstacle_ctrl.path = &opath;
  st.ego_ctrl.intent = Intent::Straight;
  st.ego_ctrl.yield_state = YieldState::Proceeding;
  st.ego_ctrl.path = &epath;
  return st;
}

long double clampl(long double v, long double lo, long double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

long double normalize_angle_l(long double a) {
  const long double two_pi = 2.0L * 3.14159265358979323846264338327950288L;
  long double r = remainderl(a, two_pi);
  if (r <= -0.5L * two_pi) r += two_pi;
  return r;
}

// The same discrete vehicle update evaluated in extended precision.
VehiclePose oracle_step(const VehiclePose& pose, const ControlInput& u,
                        const ProcessNoise& noise, const VehicleParams& p, double dt) {
  long double accel = clampl(u.accel, -(long double)p.max_brake, (long double)p.max_accel);
  long double steer = clampl(u.steer, -(long double)p.max_steer, (long double)p.max_steer);
  long double travel = (long double)pose.v * (long double)dt;
  long double x = (long double)pose.x + travel * cosl((long double)pose.theta);
  long double y = (long double)pose.y + travel * sinl((long double)pose.theta);
  long double th = normalize_angle_l(
      (long double)pose.theta +
      (travel / (long double)p.wheelbase) * tanl(steer + (long double)noise.steer));
  long double v = (long double)pose.v + (accel + (long double)noise.accel) * (long double)dt;
  if (v < 0.0L) v = 0.0L;
  return {static_cast<double>(x), static_cast<double>(y), static_cast<double>(th),
          static_cast<double>(v)};
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

double angle_err(double got, double want) {
  return std::abs(std::remainder(got - want, 2.0 * M_PI));
}

bool poses_identical(const VehiclePose& a, const VehiclePose& b) {
  return a.x == b.x && a.y == b.y && a.theta == b.theta && a.v == b.v;
}

void check_avoidance_and_confusion(const Config& cfg, const WorldMap& world) {
  ModeSummary cdf = run_experiment(cfg, world, Mode::Cdf, cfg.seed);
  ModeSummary reactive =
      run_experiment(cfg, world, Mode::Reactive,
                     cfg.seed + static_cast<std::uint64_t>(cfg.episodes));

  const double pa_cdf = percent_avoided(cdf);
  const double pa_re = percent_avoided(reactive);
  const double gap = pa_cdf - pa_re;
  verdict("C1 collision avoidance advantage",
          pa_cdf >= 90.0 && pa_re <= 65.0 && gap >= 25.0,
          fmt("cdf=%.1f%% (>=90) reactive=%.1f%% (<=65) gap=%.1fpp (>=25); "
              "imminent cdf=%d reactive=%d",
              pa_cdf, pa_re, gap, cdf.collisions_imminent,
              reactive.collisions_imminent));

  const auto& c = cdf.confusion;
  const int cutoff_total = c[0][0] + c[0][1] + c[0][2];
  const int yield_total = c[1][0] + c[1][1] + c[1][2];
  const bool recall_ok = c[0][0] >= cutoff_total - 1;
  const bool right_clean = c[2][0] == 0 && c[2][1] == 0;
  const bool yield_fp_ok =
      yield_total > 0 &&
      c[1][0] <= static_cast<int>(std::floor(0.08 * yield_total));
  verdict("C2 prediction confusion structure",
          recall_ok && right_clean && yield_fp_ok,
          fmt("cutoff recall %d/%d (miss<=1), right->cutoff/yield %d/%d (=0), "
              "yield->cutoff %d/%d (<=8%%)",
              c[0][0], cutoff_total, c[2][0], c[2][1], c[1][0], yield_total));

  const double frac = static_cast<double>(cutoff_total) / cfg.episodes;
  verdict("C3 scenario mix", std::abs(frac - 0.417) <= 0.06,
          fmt("cutoff fraction %.3f (0.417 +- 0.06)", frac));
}

void check_observation_rate(const Config& cfg, const WorldMap& world) {
  const SimParams sp = sim_params(cfg);  // per-tick notice chance 0.05
  const AgentsState st = spawn(world, Intent::TurnLeft, 4.3, sp);

  Rng rng(909);
  const int trials = 100000;
  int hit = 0;
  for (int i = 0; i < trials; ++i) {
    for (int k = 0; k < 10; ++k) {
      if (observe(st.pose, world, sp.observation, rng).pose.has_value()) {
        ++hit;
        break;
      }
    }
  }
  const double got = static_cast<double>(hit) / trials;
  const double want = 1.0 - std::pow(1.0 - sp.observation.beta, 10);
  verdict("C4 observation rate consistency", std::abs(got - want) <= 0.01,
          fmt("P(>=1 obs in 10 ticks) = %.4f, analytic %.4f (+-0.01, %d trials)",
              got, want, trials));
}

void check_filter_correctness(const Config& cfg, const WorldMap& world) {
  // (a) normalized weights after every update of a live episode
  SimParams sp = sim_params(cfg);
  InferenceParams ip = inference_params(cfg);
  ip.n_particles = 300;
  AgentsState truth = spawn(world, Intent::TurnLeft, 4.3, sp);
  ParticleFilter pf(world, sp, ip, Rng::substream(515, 1));
  pf.init(truth.pose, truth.obstacle_ctrl, truth.ego_ctrl);
  Rng world_rng = Rng::substream(515, 0);
  double worst_sum = 0.0;
  for (int k = 0; k < 50; ++k) {
    StepRecord rec = advance(truth, world, sp, std::nullopt, std::nullopt, world_rng);
    pf.propagate(rec.ego_u);
    pf.weigh(truth.pose);
    double sum = 0.0;
    for (const auto& p : pf.particles()) sum += p.weight;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    pf.maybe_resample();
  }
  const bool sums_ok = worst_sum <= 1e-9;

  // (b) systematic resampling copy counts on random weight vectors
  Rng wrng(90210);
  bool copies_ok = true;
  for (int trial = 0; trial < 1000 && copies_ok; ++trial) {
    std::size_t n = 1 + static_cast<std::size_t>(wrng.uniform() * 200);
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) {
      x = wrng.uniform();
      total += x;
    }
    for (auto& x : w) x /= total;
    auto idx = resample_systematic_indices(w, wrng.uniform());
    std::vector<int> copies(n, 0);
    for (std::size_t j : idx) ++copies[j];
    for (std::size_t i = 0; i < n; ++i) {
      double nw = static_cast<double>(n) * w[i];
      if (copies[i] < static_cast<int>(std::floor(nw)) ||
          copies[i] > static_cast<int>(std::ceil(nw))) {
        copies_ok = false;
        break;
      }
    }
  }

  // (c) a Mahalanobis-squared gap of two weighs exactly e heavier
  LikelihoodParams lp;
  SystemPose center = truth.pose;
  SystemPose off = center;
  off.obstacle.x += lp.sigma_obstacle[0] * std::sqrt(2.0);
  const double ratio =
      std::exp(log_likelihood(center, center, lp) - log_likelihood(off, center, lp));
  const bool ratio_ok = std::abs(ratio - std::exp(1.0)) <= 1e-9;

  // (d) a noise-free blind left turn is identified before lane entry
  SimParams clean = sp;
  clean.obstacle_vehicle.noise_std = {0.0, 0.0};
  clean.ego_vehicle.noise_std = {0.0, 0.0};
  clean.observation.beta = 0.0;
  InferenceParams big = inference_params(cfg);
  big.n_particles = 2000;
  AgentsState script = spawn(world, Intent::TurnLeft, 4.6, clean);
  ParticleFilter spf(world, clean, big, Rng::substream(2024, 1));
  spf.init(script.pose, script.obstacle_ctrl, script.ego_ctrl);
  Rng script_rng = Rng::substream(2024, 0);
  double p_left_entry = 0.0;
  bool entered = false;
  for (int k = 0; k < 120 && !entered; ++k) {
    StepRecord rec = advance(script, world, clean, std::nullopt, std::nullopt, script_rng);
    spf.propagate(rec.ego_u);
    spf.weigh(script.pose);
    double pl = spf.intent_posterior()[static_cast<std::size_t>(Intent::TurnLeft)];
    spf.maybe_resample();
    if (in_lane(world, script.pose.obstacle, clean.obstacle_vehicle.footprint,
                world.ego_lane_id())) {
      entered = true;
      p_left_entry = pl;
    }
  }
  const bool script_ok = entered && p_left_entry > 0.95;

  verdict("C5 filter correctness", sums_ok && copies_ok && ratio_ok && script_ok,
          fmt("max |sum(w)-1| = %.2e (<=1e-9), copy counts %s, "
              "likelihood ratio err %.2e (<=1e-9), scripted P(left)=%.3f (>0.95)",
              worst_sum, copies_ok ? "in floor/ceil" : "VIOLATED",
              std::abs(ratio - std::exp(1.0)), p_left_entry));
}

void check_kinematics(const Config&, const WorldMap&) {
  VehicleParams p;
  Rng rng(4242);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    VehiclePose pose{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0),
                     rng.uniform(-M_PI, M_PI), rng.uniform(0.0, 20.0)};
    ControlInput u{rng.uniform(-10.0, 10.0), rng.uniform(-1.0, 1.0)};
    ProcessNoise n{rng.uniform(-0.5, 0.5), rng.uniform(-0.05, 0.05)};
    double dt = (i % 2 == 0) ? 0.1 : rng.uniform(0.01, 0.5);

    VehiclePose got = step(pose, u, n, p, dt);
    VehiclePose want = oracle_step(pose, u, n, p, dt);
    worst = std::max({worst, rel_err(got.x, want.x), rel_err(got.y, want.y),
                      angle_err(got.theta, want.theta), rel_err(got.v, want.v)});
  }
  const bool oracle_ok = worst <= 1e-12;

  // without noise or acceleration the travelled distance is exactly v*dt*ticks
  double worst_len = 0.0;
  for (double steer : {0.0, 0.2, -0.35}) {
    VehiclePose pose{0.0, 0.0, 0.3, 10.0};
    double length = 0.0;
    for (int k = 0; k < 400; ++k) {
      VehiclePose next = step(pose, {0.0, steer}, {}, p, 0.1);
      length += std::hypot(next.x - pose.x, next.y - pose.y);
      pose = next;
    }
    worst_len = std::max(worst_len, std::abs(length - 400 * 10.0 * 0.1));
  }
  const bool length_ok = worst_len <= 1e-9;

  verdict("C6 kinematics precision", oracle_ok && length_ok,
          fmt("max oracle error %.2e (<=1e-12), path length error %.2e (<=1e-9)",
              worst, worst_len));
}

void check_determinism(const Config& base, const WorldMap& world) {
  Config cfg = base;
  cfg.episodes = 100;
  cfg.jobs = 1;
  ModeSummary a = run_experiment(cfg, world, Mode::Cdf, cfg.seed);
  ModeSummary b = run_experiment(cfg, world, Mode::Cdf, cfg.seed);
  Config wide = cfg;
  wide.jobs = 8;
  ModeSummary c = run_experiment(wide, world, Mode::Cdf, cfg.seed);

  const std::string ta = episodes_csv({&a});
  const bool rerun_ok = ta == episodes_csv({&b});
  const bool jobs_ok = ta == episodes_csv({&c});
  verdict("C7 determinism", rerun_ok && jobs_ok,
          fmt("rerun bytes %s, 1 vs 8 workers bytes %s (%d episodes)",
              rerun_ok ? "equal" : "DIFFER", jobs_ok ? "equal" : "DIFFER",
              cfg.episodes));
}

void check_counterfactual_prefix(const Config& base, const WorldMap& world) {
  Config cfg = base;
  int checked = 0;
  int mismatched = 0;
  for (std::uint64_t seed = cfg.seed; seed < cfg.seed + 100; ++seed) {
    EpisodeOptions opts;
    opts.keep_trace = true;
    EpisodeResult prim = run_episode(cfg, world, Mode::Cdf, seed, opts);
    EpisodeOptions cf = opts;
    cf.counterfactual = true;
    EpisodeResult repl = run_episode(cfg, world, Mode::Cdf, seed, cf);

    // identical up to and including the tick where braking latched; the poses
    // of that row predate the intervention
    std::size_t upto = prim.trace.size();
    for (std::size_t i = 0; i < prim.trace.size(); ++i) {
      if (prim.trace[i].braking) {
        upto = i + 1;
        break;
      }
    }
    ++checked;
    if (repl.trace.size() < upto) {
      ++mismatched;
      continue;
    }
    for (std::size_t i = 0; i < upto; ++i) {
      if (!poses_identical(prim.trace[i].obstacle, repl.trace[i].obstacle) ||
          !poses_identical(prim.trace[i].ego, repl.trace[i].ego) ||
          prim.trace[i].observed != repl.trace[i].observed ||
          prim.trace[i].gap != repl.trace[i].gap) {
        ++mismatched;
        break;
      }
    }
  }
  verdict("C8 counterfactual prefix integrity", checked == 100 && mismatched == 0,
          fmt("%d/%d replays bit-identical up to the intervention", checked - mismatched,
              checked));
}

}  // namespace

int main() {
  const unsigned hw = std::thread::hardware_concurrency();
  Config cfg;  // shipped defaults: 1000 episodes per mode, base seed 12345
  cfg.jobs = static_cast<int>(std::min(8u, std::max(1u, hw)));
  const WorldMap world = build_t_intersection(world_config(cfg));

  std::printf("acceptance: %d episodes per mode, %d workers\n", cfg.episodes, cfg.jobs);
  check_avoidance_and_confusion(cfg, world);
  check_observation_rate(cfg, world);
  check_filter_correctness(cfg, world);
  check_kinematics(cfg, world);
  check_determinism(cfg, world);
  check_counterfactual_prefix(cfg, world);

  std::printf("acceptance: %s\n", g_all_ok ? "all criteria satisfied" : "FAILURES above");
  return g_all_ok ? 0 : 1;
}
