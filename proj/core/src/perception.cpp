#include "cdf/perception.hpp"

#include <cmath>
#include <stdexcept>

namespace cdf {

Observation observe(const SystemPose& system, const WorldMap& world,
                    const ObservationParams& params, Rng& rng) {
  if (params.beta < 0.0 || params.beta > 1.0)
    throw std::invalid_argument("observe: beta must be in [0, 1]");
  // Draw the attention coin unconditionally so the stream layout per tick does
  // not depend on visibility.
  bool noticed = rng.bernoulli(params.beta);
  if (!isovist_contains(world, system.obstacle, system.ego)) return {};
  if (!noticed) return {};

  VehiclePose p = system.ego;
  p.x += rng.gaussian(0.0, params.noise_std[0]);
  p.y += rng.gaussian(0.0, params.noise_std[1]);
  p.theta = normalize_angle(p.theta + rng.gaussian(0.0, params.noise_std[2]));
  p.v = std::max(0.0, p.v + rng.gaussian(0.0, params.noise_std[3]));
  return {p};
}

Belief update_belief(const Belief& belief, const Observation& obs, int tick,
                     double dt, const ObservationParams& params) {
  if (obs.pose) return {obs.pose, tick};
  if (!belief.pose) return belief;
  if (!params.belief_extrapolate) return belief;

  VehiclePose p = *belief.pose;
  p.x += p.v * dt * std::cos(p.theta);
  p.y += p.v * dt * std::sin(p.theta);
  return {p, belief.last_update_tick};
}

}  // namespace cdf
