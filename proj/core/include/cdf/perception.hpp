#pragma once

#include <array>
#include <optional>

#include "cdf/dynamics.hpp"
#include "cdf/world.hpp"

namespace cdf {

// What the obstacle driver got to see this tick: nothing, or a noisy ego pose.
struct Observation {
  std::optional<VehiclePose> pose;
};

// The obstacle driver's point estimate of the ego. Empty until the first
// observation and never empty again afterwards.
struct Belief {
  std::optional<VehiclePose> pose;
  int last_update_tick = -1;
};

struct ObservationParams {
  double beta = 0.05;  // per-tick chance of actually noticing a visible ego
  std::array<double, 4> noise_std{0.5, 0.5, 0.05, 0.5};  // x, y, theta, v
  bool belief_extrapolate = true;
};

// Draws the obstacle's observation of the ego. The ego must be inside the
// obstacle's isovist and the attention coin must come up heads; otherwise the
// observation is empty.
Observation observe(const SystemPose& system, const WorldMap& world,
                    const ObservationParams& params, Rng& rng);

// Folds an observation into the belief. Without a new observation a stale
// belief coasts forward one noise-free constant-velocity step (when
// extrapolation is enabled) so that a briefly-glimpsed ego keeps approaching
// instead of freezing in place.
Belief update_belief(const Belief& belief, const Observation& obs, int tick,
                     double dt, const ObservationParams& params);

}  // namespace cdf
