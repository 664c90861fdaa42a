#pragma once

#include <cstddef>
#include <limits>
#include <utility>

#include "cdf/dynamics.hpp"
#include "cdf/geometry.hpp"
#include "cdf/perception.hpp"
#include "cdf/world.hpp"

namespace cdf {

// Yield machine for the obstacle driver. Proceeding is absorbing: once the
// driver commits to the turn there is no abort.
enum class YieldState { Approaching, HoldingAtStop, Proceeding, Yielding };

const char* to_string(YieldState s);

struct BehaviorParams {
  double ego_target_speed = 13.4;
  double obstacle_turn_speed = 5.0;
  double obstacle_cruise_speed = 13.4;
  double obstacle_approach_speed = 7.0;
  double lookahead_min = 3.0;
  double lookahead_gain = 0.8;
  double comfort_decel = 2.0;
  double gap_threshold_s = 4.0;   // accepted time gap when pulling out
  double hold_min_s = 1.1;        // dwell at the line before the gap decision
  double pass_margin_m = 6.0;     // how far beyond the conflict counts as passed
};

struct ControllerState {
  Intent intent = Intent::Straight;
  YieldState yield_state = YieldState::Approaching;
  const Path* path = nullptr;
  double target_speed = 0.0;
  double hold_elapsed_s = 0.0;
  std::size_t path_hint = Polyline::kNoHint;     // projection cache
  std::size_t believed_hint = Polyline::kNoHint;
};

// How a (possibly believed) ego pose relates to the conflict between an
// obstacle intent path and the ego lane.
struct GapAssessment {
  bool has_conflict = false;
  bool passed = false;
  double ttc = std::numeric_limits<double>::infinity();
};

GapAssessment assess_conflict_gap(const WorldMap& world, Intent intent,
                                  const VehiclePose& ego_estimate,
                                  double pass_margin, std::size_t* ego_path_hint);

// Rear-axle arc length at which a vehicle holds so its front bumper sits on
// the stop line.
double hold_stop_s(const Path& path, const Footprint& fp);

// Pure-pursuit lane keeping plus constant-speed cruise for the ego. The
// obstacle argument is unused; it exists so future gap logic has both poses.
std::pair<ControlInput, ControllerState> ego_control(const VehiclePose& ego,
                                                     const VehiclePose& obstacle,
                                                     const ControllerState& state,
                                                     const VehicleParams& vp,
                                                     const BehaviorParams& bp,
                                                     double dt);

// Obstacle driver: pure pursuit along the intent path plus the yield machine.
// Deliberately takes only the belief, never the true ego pose.
std::pair<ControlInput, ControllerState> obstacle_control(const VehiclePose& obstacle,
                                                          const Belief& belief,
                                                          const ControllerState& state,
                                                          const WorldMap& world,
                                                          const VehicleParams& vp,
                                                          const BehaviorParams& bp,
                                                          double dt);

}  // namespace cdf
