#pragma once

#include <optional>

#include "cdf/behavior.hpp"
#include "cdf/dynamics.hpp"
#include "cdf/perception.hpp"
#include "cdf/rng.hpp"
#include "cdf/world.hpp"

namespace cdf {

struct SimParams {
  VehicleParams ego_vehicle{};
  VehicleParams obstacle_vehicle{};
  ObservationParams observation{};
  BehaviorParams behavior{};
  double dt = 0.1;
};

// Everything that evolves from tick to tick: the physical poses, the obstacle
// driver's belief about the ego, and both controllers' internal state.
struct AgentsState {
  SystemPose pose{};
  Belief belief{};
  ControllerState obstacle_ctrl{};
  ControllerState ego_ctrl{};
  int tick = 0;
};

// What one tick did, for traces and for conditioning the filter on the ego
// command that was actually applied.
struct StepRecord {
  Observation obs{};
  ControlInput obstacle_u{};
  ControlInput ego_u{};
  ProcessNoise obstacle_noise{};
  ProcessNoise ego_noise{};
};

// Advances the coupled two-vehicle state by one tick. This single function is
// the generative model: the ground-truth rollout and every particle go
// through it, so the filter's transition density matches the simulator by
// construction.
//
// The rng draw order is fixed: attention coin (plus observation noise when
// the ego is noticed), obstacle process noise, ego process noise. Two runs
// from equal states and equal rng states therefore stay bit-identical.
//
// ego_override substitutes the whole ego command (the filter injects the
// command the real planner issued); ego_accel_override only forces the
// acceleration channel while pure pursuit keeps steering (emergency braking).
StepRecord advance(AgentsState& state, const WorldMap& world, const SimParams& params,
                   const std::optional<ControlInput>& ego_override,
                   const std::optional<double>& ego_accel_override, Rng& rng);

}  // namespace cdf
