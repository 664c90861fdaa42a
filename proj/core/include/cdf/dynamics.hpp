#pragma once

#include "cdf/rng.hpp"

namespace cdf {

// Rear-axle pose plus forward speed.
struct VehiclePose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, normalized to (-pi, pi]
  double v = 0.0;      // m/s, never negative
};

// Joint pose of the two agents. The obstacle comes first by convention
// everywhere an 8-component vector is formed from this.
struct SystemPose {
  VehiclePose obstacle;
  VehiclePose ego;
};

struct ControlInput {
  double accel = 0.0;  // m/s^2
  double steer = 0.0;  // radians at the front axle
};

struct ProcessNoise {
  double accel = 0.0;
  double steer = 0.0;
};

struct NoiseStd {
  double accel = 0.3;
  double steer = 0.02;
};

// Oriented-rectangle body, described relative to the rear axle.
struct Footprint {
  double length = 4.5;
  double width = 1.8;
  double rear_axle_offset = 1.0;  // rear axle to rear bumper
};

struct VehicleParams {
  double wheelbase = 2.7;
  Footprint footprint{};
  double max_accel = 2.0;
  double max_brake = 4.877;
  double max_steer = 0.55;
  NoiseStd noise_std{};
};

// Wraps an angle to (-pi, pi].
double normalize_angle(double a);

// Kinematic bicycle step. Commands are clamped to the actuator limits first;
// the noise terms then perturb the realized acceleration and steering.
VehiclePose step(const VehiclePose& pose, const ControlInput& u,
                 const ProcessNoise& noise, const VehicleParams& params, double dt);

ProcessNoise sample_noise(const VehicleParams& params, Rng& rng);

}  // namespace cdf
