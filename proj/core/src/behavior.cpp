#include "cdf/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdf {

const char* to_string(YieldState s) {
  switch (s) {
    case YieldState::Approaching: return "approaching";
    case YieldState::HoldingAtStop: return "holding";
    case YieldState::Proceeding: return "proceeding";
    case YieldState::Yielding: return "yielding";
  }
  return "?";
}

double hold_stop_s(const Path& path, const Footprint& fp) {
  if (path.stopline_s < 0.0)
    throw std::invalid_argument("hold_stop_s: path never crosses the stop line");
  return path.stopline_s - (fp.length - fp.rear_axle_offset);
}

GapAssessment assess_conflict_gap(const WorldMap& world, Intent intent,
                                  const VehiclePose& ego_estimate,
                                  double pass_margin, std::size_t* ego_path_hint) {
  GapAssessment g;
  auto conflict = world.conflict(intent);
  if (!conflict) return g;
  g.has_conflict = true;

  const Polyline& ego_line = world.ego_path().line;
  std::size_t hint = ego_path_hint ? *ego_path_hint : Polyline::kNoHint;
  auto proj = ego_line.project({ego_estimate.x, ego_estimate.y}, hint);
  if (ego_path_hint) *ego_path_hint = proj.hint;

  if (proj.s >= conflict->s_on_ego_path + pass_margin) {
    g.passed = true;
    return g;
  }
  double dist = std::max(0.0, conflict->s_on_ego_path - proj.s);
  g.ttc = dist / std::max(ego_estimate.v, 0.1);
  return g;
}

namespace {

Vec2 lookahead_point(const Polyline& line, double s) {
  if (s <= line.length()) return line.point_at(s);
  // Past the end: continue along the final segment direction.
  double over = s - line.length();
  double h = line.heading_at(line.length());
  Vec2 end = line.points().back();
  return {end.x + over * std::cos(h), end.y + over * std::sin(h)};
}

double pure_pursuit_steer(const VehiclePose& pose, const Path& path,
                          const VehicleParams& vp, const BehaviorParams& bp,
                          std::size_t& hint, double& s_out) {
  auto proj = path.line.project({pose.x, pose.y}, hint);
  hint = proj.hint;
  s_out = proj.s;
  double ld = std::max(bp.lookahead_min, bp.lookahead_gain * pose.v);
  Vec2 target = lookahead_point(path.line, proj.s + ld);
  double dx = target.x - pose.x;
  double dy = target.y - pose.y;
  double dist = std::hypot(dx, dy);
  if (dist < 1e-9) return 0.0;
  double alpha = normalize_angle(std::atan2(dy, dx) - pose.theta);
  double steer = std::atan2(2.0 * vp.wheelbase * std::sin(alpha), dist);
  return std::clamp(steer, -vp.max_steer, vp.max_steer);
}

// Deadbeat speed tracking clamped to actuator limits; braking is additionally
// capped so routine speed changes stay below emergency rates.
double speed_accel(double v, double target, double dt, const VehicleParams& vp,
                   const BehaviorParams& bp) {
  double brake_cap = std::min(vp.max_brake, 1.5 * bp.comfort_decel);
  return std::clamp((target - v) / dt, -brake_cap, vp.max_accel);
}

}  // namespace

std::pair<ControlInput, ControllerState> ego_control(const VehiclePose& ego,
                                                     const VehiclePose& /*obstacle*/,
                                                     const ControllerState& state,
                                                     const VehicleParams& vp,
                                                     const BehaviorParams& bp,
                                                     double dt) {
  if (state.path == nullptr) throw std::invalid_argument("ego_control: state has no path");
  ControllerState st = state;
  st.target_speed = bp.ego_target_speed;
  double s = 0.0;
  ControlInput u;
  u.steer = pure_pursuit_steer(ego, *st.path, vp, bp, st.path_hint, s);
  u.accel = speed_accel(ego.v, st.target_speed, dt, vp, bp);
  return {u, st};
}

std::pair<ControlInput, ControllerState> obstacle_control(const VehiclePose& obstacle,
                                                          const Belief& belief,
                                                          const ControllerState& state,
                                                          const WorldMap& world,
                                                          const VehicleParams& vp,
                                                          const BehaviorParams& bp,
                                                          double dt) {
  if (state.path == nullptr) throw std::invalid_argument("obstacle_control: state has no path");
  ControllerState st = state;
  ControlInput u;
  double s = 0.0;
  u.steer = pure_pursuit_steer(obstacle, *st.path, vp, bp, st.path_hint, s);

  double s_hold = hold_stop_s(*st.path, vp.footprint);

  switch (st.yield_state) {
    case YieldState::Approaching:
      if (s >= s_hold - 0.3 && obstacle.v < 0.15) {
        st.yield_state = YieldState::HoldingAtStop;
        st.hold_elapsed_s = 0.0;
      }
      break;
    case YieldState::HoldingAtStop: {
      st.hold_elapsed_s += dt;
      if (st.hold_elapsed_s >= bp.hold_min_s - 1e-9) {
        if (st.intent == Intent::TurnRight || !belief.pose) {
          st.yield_state = YieldState::Proceeding;
        } else {
          GapAssessment g = assess_conflict_gap(world, st.intent, *belief.pose,
                                                bp.pass_margin_m, &st.believed_hint);
          if (!g.has_conflict || g.passed || g.ttc > bp.gap_threshold_s) {
            st.yield_state = YieldState::Proceeding;
          } else {
            st.yield_state = YieldState::Yielding;
          }
        }
      }
      break;
    }
    case YieldState::Yielding: {
      if (!belief.pose) {
        // A yield requires a belief to yield to, so this cannot happen through
        // the machine's own transitions; recover by proceeding.
        st.yield_state = YieldState::Proceeding;
        break;
      }
      GapAssessment g = assess_conflict_gap(world, st.intent, *belief.pose,
                                            bp.pass_margin_m, &st.believed_hint);
      if (!g.has_conflict || g.passed) st.yield_state = YieldState::Proceeding;
      break;
    }
    case YieldState::Proceeding:
      break;
  }

  switch (st.yield_state) {
    case YieldState::Approaching: {
      double d = std::max(0.0, s_hold - s);
      st.target_speed = std::min(bp.obstacle_approach_speed,
                                 std::sqrt(2.0 * bp.comfort_decel * d));
      break;
    }
    case YieldState::HoldingAtStop:
    case YieldState::Yielding:
      st.target_speed = 0.0;
      break;
    case YieldState::Proceeding:
      st.target_speed = s < st.path->turn_end_s ? bp.obstacle_turn_speed
                                                : bp.obstacle_cruise_speed;
      break;
  }

  u.accel = speed_accel(obstacle.v, st.target_speed, dt, vp, bp);
  return {u, st};
}

}  // namespace cdf
