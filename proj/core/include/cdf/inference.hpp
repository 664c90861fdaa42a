#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "cdf/sim.hpp"

namespace cdf {

struct LikelihoodParams {
  std::array<double, 4> sigma_obstacle{0.3, 0.3, 0.05, 0.3};  // x, y, theta, v
  std::array<double, 4> sigma_ego{0.3, 0.3, 0.05, 0.3};
};

enum class ResamplePolicy { Always, Ess };

struct InferenceParams {
  int n_particles = 1000;
  double p_left = 0.75;  // prior that a stem vehicle turns left
  LikelihoodParams likelihood{};
  ResamplePolicy resample = ResamplePolicy::Always;
  double ess_fraction = 0.5;  // Ess policy: resample when ess < fraction * n
  bool generative_ego = false;  // particles roll their own ego controller
  // The alarm threshold sits above the ambiguity pulse that every pull-out
  // produces. Right after the obstacle starts moving, speed evidence kills the
  // yielding hypotheses while heading evidence cannot yet separate the two
  // turns (the car has moved centimeters), so the danger mass briefly rides at
  // P(left)*P(unseen) / (P(left)*P(unseen) + P(right)), about 0.62 at the
  // defaults. 0.75 clears that pulse by many resampling sigmas and is crossed
  // decisively once the headings diverge.
  double imminent_threshold = 0.75;
  double imminent_horizon_s = 6.0;
};

// One hypothesis about the joint world: poses, the obstacle driver's belief,
// its yield machine, and its intent (stored in obstacle_ctrl.intent).
struct Particle {
  AgentsState state{};
  double weight = 0.0;
};

struct FilterStats {
  int degeneracy_events = 0;  // updates where every particle was impossible
  int resample_count = 0;
};

// Posterior mass on "the obstacle has committed to crossing the ego's path
// while the ego arrives inside the unacceptable-gap window", plus the
// marginals it is built from. Belief does not gate the danger mass: once a
// particle is Proceeding its driver cannot abort, so whether it has seen the
// ego by now no longer changes its trajectory.
struct ImminenceReport {
  bool alarm = false;
  double p = 0.0;
  double p_intent_left = 0.0;
  double p_proceeding = 0.0;
  double p_believed_clear = 0.0;
  double true_ttc = std::numeric_limits<double>::infinity();
};

// Unnormalized log density of the measured joint pose under a diagonal
// Gaussian centered on a particle's pose. Heading residuals wrap on the
// circle. Normalization constants cancel in the weight update and are
// omitted.
double log_likelihood(const SystemPose& hypothesis, const SystemPose& measured,
                      const LikelihoodParams& lp);

// Low-variance resampler: index k selects the cumulative-weight bucket
// containing (k + u01) / n, so every index is copied either floor(n*w) or
// ceil(n*w) times. u01 must lie in [0, 1).
std::vector<std::size_t> resample_systematic_indices(
    const std::vector<double>& weights, double u01);

class ParticleFilter {
 public:
  ParticleFilter(const WorldMap& world, const SimParams& sim,
                 const InferenceParams& params, Rng rng);

  // Spawns every particle at the measured joint pose with an empty belief and
  // an intent drawn iid from the prior. A sliver of support (1% of particles)
  // is kept for any intent with nonzero prior so one unlucky draw cannot
  // erase a hypothesis at t=0.
  void init(const SystemPose& measured, const ControllerState& obstacle_template,
            const ControllerState& ego_template);

  // Runs every particle through the generative model. ego_command is the
  // command the real planner issued this tick; with generative_ego the
  // particles ignore it and plan for themselves.
  void propagate(const std::optional<ControlInput>& ego_command);

  // Bayes update against the measured joint pose, in log space. If even the
  // best particle is impossible the weights reset to uniform and the event is
  // counted instead of poisoning the episode with NaNs.
  void weigh(const SystemPose& measured);

  // Applies the resample policy. Returns whether a resample happened.
  bool maybe_resample();

  // propagate + weigh + maybe_resample.
  void step(const std::optional<ControlInput>& ego_command, const SystemPose& measured);

  std::array<double, 3> intent_posterior() const;  // indexed by Intent
  Intent map_intent() const;

  // Checks the danger hypothesis against the true ego pose. Evaluated from
  // the current weights; call it between weigh() and maybe_resample() for the
  // exact posterior.
  ImminenceReport imminence(const VehiclePose& true_ego);

  double ess() const;
  std::vector<Particle>& particles() { return particles_; }
  const std::vector<Particle>& particles() const { return particles_; }
  const FilterStats& stats() const { return stats_; }
  const InferenceParams& params() const { return params_; }

 private:
  const WorldMap& world_;
  SimParams sim_;
  InferenceParams params_;
  Rng rng_;
  std::vector<Particle> particles_;
  FilterStats stats_{};
  std::size_t true_ego_hint_ = Polyline::kNoHint;
};

}  // namespace cdf
