#include "cdf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "cdf/behavior.hpp"
#include "cdf/sim.hpp"

namespace cdf {

const char* to_string(Mode mode) {
  return mode == Mode::Cdf ? "cdf" : "reactive";
}

const char* to_string(ScenarioLabel label) {
  switch (label) {
    case ScenarioLabel::Cutoff: return "cutoff";
    case ScenarioLabel::Yield: return "yield";
    case ScenarioLabel::Right: return "right";
  }
  return "?";
}

ScenarioLabel classify_prediction(bool alarm_fired, Intent map_intent) {
  if (alarm_fired) return ScenarioLabel::Cutoff;
  return map_intent == Intent::TurnLeft ? ScenarioLabel::Yield : ScenarioLabel::Right;
}

namespace {

ScenarioLabel ground_truth_label(bool counterfactual_collision, Intent intent) {
  if (counterfactual_collision) return ScenarioLabel::Cutoff;
  return intent == Intent::TurnLeft ? ScenarioLabel::Yield : ScenarioLabel::Right;
}

}  // namespace

EpisodeResult run_episode(const Config& cfg, const WorldMap& world, Mode mode,
                          std::uint64_t episode_seed, const EpisodeOptions& opts) {
  const SimParams sp = sim_params(cfg);
  const Footprint& ofp = sp.obstacle_vehicle.footprint;
  const Footprint& efp = sp.ego_vehicle.footprint;

  Rng world_rng = Rng::substream(episode_seed, 0);
  Rng filter_rng = Rng::substream(episode_seed, 1);

  // Scenario draws come first and always in this order, so every variant of
  // the episode (primary, counterfactual, either mode) sees the same world
  // randomness.
  const double ttc0 = world_rng.uniform(cfg.ego_start_ttc_min, cfg.ego_start_ttc_max);
  Intent intent = world_rng.uniform() < cfg.p_left ? Intent::TurnLeft : Intent::TurnRight;
  if (opts.forced_intent) intent = *opts.forced_intent;

  const Path& opath = world.path(intent);
  const Path& epath = world.ego_path();
  const auto conflict = world.conflict(Intent::TurnLeft);
  if (!conflict) throw ConfigError("world has no conflict point for the left turn");

  const double s_hold = hold_stop_s(opath, ofp);
  const Vec2 op = opath.line.point_at(s_hold);
  const double s_ego0 = conflict->s_on_ego_path - cfg.ego_target_speed * ttc0;
  if (s_ego0 < 0.0)
    throw ConfigError(
        "ego_approach_m is too short for ego_start_ttc_max at ego_target_speed");
  const Vec2 ep = epath.line.point_at(s_ego0);

  AgentsState st;
  st.pose.obstacle = {op.x, op.y, opath.line.heading_at(s_hold), 0.0};
  st.pose.ego = {ep.x, ep.y, epath.line.heading_at(s_ego0), cfg.ego_target_speed};
  st.obstacle_ctrl.intent = intent;
  st.obstacle_ctrl.yield_state = YieldState::Approaching;
  st.obstacle_ctrl.path = &opath;
  st.ego_ctrl.intent = Intent::Straight;
  st.ego_ctrl.yield_state = YieldState::Proceeding;
  st.ego_ctrl.path = &epath;

  std::optional<ParticleFilter> pf;
  if (mode == Mode::Cdf && !opts.counterfactual) {
    pf.emplace(world, sp, inference_params(cfg), filter_rng);
    pf->init(st.pose, st.obstacle_ctrl, st.ego_ctrl);
  }

  EpisodeResult res;
  res.seed = episode_seed;
  res.mode = mode;
  res.true_intent = intent;
  res.min_gap = footprint_clearance(st.pose.obstacle, ofp, st.pose.ego, efp);

  const int cap_ticks = static_cast<int>(std::llround(cfg.episode_cap_s / cfg.sim_dt));
  bool braking = false;
  bool latch_released = false;
  std::size_t ego_hint = Polyline::kNoHint;
  std::size_t obstacle_hint = Polyline::kNoHint;
  std::size_t gate_hint = Polyline::kNoHint;

  auto post = [&](Intent which) {
    if (pf) return pf->intent_posterior()[static_cast<std::size_t>(which)];
    return which == intent ? 1.0 : 0.0;
  };

  if (opts.keep_trace) {
    TraceRow row;
    row.t = 0.0;
    row.obstacle = st.pose.obstacle;
    row.ego = st.pose.ego;
    row.yield_state = st.obstacle_ctrl.yield_state;
    row.p_left = post(Intent::TurnLeft);
    row.p_right = post(Intent::TurnRight);
    row.gap = res.min_gap;
    res.trace.push_back(row);
  }

  res.termination = "cap";
  res.termination_time = cap_ticks * cfg.sim_dt;

  for (int tick = 0; tick < cap_ticks; ++tick) {
    std::optional<double> brake;
    if (braking && !opts.counterfactual) brake = -sp.ego_vehicle.max_brake;
    const StepRecord rec = advance(st, world, sp, std::nullopt, brake, world_rng);
    const double t_now = (tick + 1) * cfg.sim_dt;

    const double gap = footprint_clearance(st.pose.obstacle, ofp, st.pose.ego, efp);
    res.min_gap = std::min(res.min_gap, gap);
    const bool collided = footprints_collide(st.pose.obstacle, ofp, st.pose.ego, efp);

    double p_imminent = 0.0;
    if (pf && !collided) {
      pf->propagate(rec.ego_u);
      pf->weigh(st.pose);
      const ImminenceReport rep = pf->imminence(st.pose.ego);
      p_imminent = rep.p;
      if (!braking && !latch_released && rep.alarm) {
        braking = true;
        res.alarm_time = t_now;
      }
      pf->maybe_resample();
    }
    if (mode == Mode::Reactive && !opts.counterfactual && !collided && !braking &&
        !latch_released) {
      if (in_lane(world, st.pose.obstacle, ofp, world.ego_lane_id())) {
        const GapAssessment truth = assess_conflict_gap(
            world, Intent::TurnLeft, st.pose.ego, cfg.pass_margin_m, &gate_hint);
        if (truth.has_conflict && !truth.passed) {
          braking = true;
          res.alarm_time = t_now;
        }
      }
    }

    // Release the brake latch once the obstacle is fully through its turn;
    // holding it longer would stall the episode for no reason.
    if (braking) {
      const auto oproj =
          opath.line.project({st.pose.obstacle.x, st.pose.obstacle.y}, obstacle_hint);
      obstacle_hint = oproj.hint;
      if (oproj.s >= opath.turn_end_s + ofp.length) {
        braking = false;
        latch_released = true;
      }
    }

    if (opts.keep_trace) {
      TraceRow row;
      row.t = t_now;
      row.obstacle = st.pose.obstacle;
      row.ego = st.pose.ego;
      row.observed = rec.obs.pose.has_value();
      row.believed = st.belief.pose;
      row.obstacle_u = rec.obstacle_u;
      row.ego_u = rec.ego_u;
      row.yield_state = st.obstacle_ctrl.yield_state;
      row.p_left = post(Intent::TurnLeft);
      row.p_right = post(Intent::TurnRight);
      row.p_imminent = p_imminent;
      row.braking = braking;
      row.gap = gap;
      res.trace.push_back(row);
    }

    if (collided) {
      res.collision = true;
      res.termination = "collision";
      res.termination_time = t_now;
      break;
    }

    const auto eproj = epath.line.project({st.pose.ego.x, st.pose.ego.y}, ego_hint);
    ego_hint = eproj.hint;
    if (eproj.s >= epath.line.length() - 0.5) {
      res.termination = "ego_exit";
      res.termination_time = t_now;
      break;
    }
  }

  res.anomalous = res.termination == "cap";
  res.final_p_left = post(Intent::TurnLeft);

  if (opts.counterfactual) {
    res.scenario_label = ground_truth_label(res.collision, intent);
    res.predicted_label = classify_prediction(false, intent);
    return res;
  }

  EpisodeOptions cf_opts;
  cf_opts.counterfactual = true;
  cf_opts.forced_intent = opts.forced_intent;
  const EpisodeResult cf = run_episode(cfg, world, mode, episode_seed, cf_opts);
  res.scenario_label = ground_truth_label(cf.collision, intent);
  res.anomalous = res.anomalous || cf.anomalous;

  if (mode == Mode::Cdf) {
    res.predicted_label = classify_prediction(res.alarm_time.has_value(), pf->map_intent());
  } else {
    res.predicted_label = classify_prediction(res.alarm_time.has_value(), intent);
  }
  return res;
}

double percent_avoided(const ModeSummary& s) {
  if (s.collisions_imminent == 0) return 100.0;
  return 100.0 * (1.0 - static_cast<double>(s.collisions_occurred) /
                            static_cast<double>(s.collisions_imminent));
}

ModeSummary run_experiment(const Config& cfg, const WorldMap& world, Mode mode,
                           std::uint64_t base_seed) {
  const int n = cfg.episodes;
  std::vector<EpisodeResult> results(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        EpisodeOptions o;
        o.keep_trace = cfg.trace;
        results[static_cast<std::size_t>(i)] =
            run_episode(cfg, world, mode, base_seed + static_cast<std::uint64_t>(i), o);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int jobs = std::max(1, std::min(cfg.jobs, n));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ModeSummary s;
  s.mode = mode;
  s.episodes = n;
  for (const auto& r : results) {
    s.confusion[static_cast<std::size_t>(r.scenario_label)]
               [static_cast<std::size_t>(r.predicted_label)] += 1;
    if (r.scenario_label == ScenarioLabel::Cutoff) s.collisions_imminent += 1;
    if (r.collision) s.collisions_occurred += 1;
    if (r.anomalous) s.anomalous += 1;
  }
  s.results = std::move(results);
  return s;
}

}  // namespace cdf
