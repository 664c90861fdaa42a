#include "cdf/sim.hpp"

namespace cdf {

StepRecord advance(AgentsState& state, const WorldMap& world, const SimParams& params,
                   const std::optional<ControlInput>& ego_override,
                   const std::optional<double>& ego_accel_override, Rng& rng) {
  StepRecord rec;

  rec.obs = observe(state.pose, world, params.observation, rng);
  state.belief = update_belief(state.belief, rec.obs, state.tick, params.dt,
                               params.observation);

  auto [ou, oc] = obstacle_control(state.pose.obstacle, state.belief,
                                   state.obstacle_ctrl, world,
                                   params.obstacle_vehicle, params.behavior,
                                   params.dt);
  state.obstacle_ctrl = oc;
  rec.obstacle_u = ou;

  if (ego_override) {
    rec.ego_u = *ego_override;
  } else {
    auto [eu, ec] = ego_control(state.pose.ego, state.pose.obstacle, state.ego_ctrl,
                                params.ego_vehicle, params.behavior, params.dt);
    state.ego_ctrl = ec;
    rec.ego_u = eu;
    if (ego_accel_override) rec.ego_u.accel = *ego_accel_override;
  }

  rec.obstacle_noise = sample_noise(params.obstacle_vehicle, rng);
  rec.ego_noise = sample_noise(params.ego_vehicle, rng);

  state.pose.obstacle = step(state.pose.obstacle, rec.obstacle_u, rec.obstacle_noise,
                             params.obstacle_vehicle, params.dt);
  state.pose.ego = step(state.pose.ego, rec.ego_u, rec.ego_noise,
                        params.ego_vehicle, params.dt);
  state.tick += 1;
  return rec;
}

}  // namespace cdf
