#include "cdf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdf {

double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);
  if (r <= -M_PI) r += 2.0 * M_PI;
  return r;
}

VehiclePose step(const VehiclePose& pose, const ControlInput& u,
                 const ProcessNoise& noise, const VehicleParams& params, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step: dt must be positive");
  double accel = std::clamp(u.accel, -params.max_brake, params.max_accel);
  double steer = std::clamp(u.steer, -params.max_steer, params.max_steer);

  VehiclePose out;
  double travel = pose.v * dt;
  out.x = pose.x + travel * std::cos(pose.theta);
  out.y = pose.y + travel * std::sin(pose.theta);
  out.theta = normalize_angle(pose.theta +
                              (travel / params.wheelbase) * std::tan(steer + noise.steer));
  out.v = std::max(0.0, pose.v + (accel + noise.accel) * dt);
  return out;
}

ProcessNoise sample_noise(const VehicleParams& params, Rng& rng) {
  ProcessNoise n;
  n.accel = rng.gaussian(0.0, params.noise_std.accel);
  n.steer = rng.gaussian(0.0, params.noise_std.steer);
  return n;
}

}  // namespace cdf
