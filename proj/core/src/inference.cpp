#include "cdf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdf {

double log_likelihood(const SystemPose& hypothesis, const SystemPose& measured,
                      const LikelihoodParams& lp) {
  double ll = 0.0;
  auto add = [&ll](double residual, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("log_likelihood: sigma must be positive");
    double z = residual / sigma;
    ll -= 0.5 * z * z;
  };
  add(hypothesis.obstacle.x - measured.obstacle.x, lp.sigma_obstacle[0]);
  add(hypothesis.obstacle.y - measured.obstacle.y, lp.sigma_obstacle[1]);
  add(normalize_angle(hypothesis.obstacle.theta - measured.obstacle.theta),
      lp.sigma_obstacle[2]);
  add(hypothesis.obstacle.v - measured.obstacle.v, lp.sigma_obstacle[3]);
  add(hypothesis.ego.x - measured.ego.x, lp.sigma_ego[0]);
  add(hypothesis.ego.y - measured.ego.y, lp.sigma_ego[1]);
  add(normalize_angle(hypothesis.ego.theta - measured.ego.theta), lp.sigma_ego[2]);
  add(hypothesis.ego.v - measured.ego.v, lp.sigma_ego[3]);
  return ll;
}

std::vector<std::size_t> resample_systematic_indices(
    const std::vector<double>& weights, double u01) {
  if (weights.empty())
    throw std::invalid_argument("resample_systematic_indices: empty weights");
  if (!(u01 >= 0.0 && u01 < 1.0))
    throw std::invalid_argument("resample_systematic_indices: u01 outside [0,1)");
  const std::size_t n = weights.size();
  std::vector<std::size_t> out(n);
  std::size_t i = 0;
  double c = weights[0];
  for (std::size_t k = 0; k < n; ++k) {
    double pos = (static_cast<double>(k) + u01) / static_cast<double>(n);
    while (pos > c && i + 1 < n) {
      ++i;
      c += weights[i];
    }
    out[k] = i;
  }
  return out;
}

ParticleFilter::ParticleFilter(const WorldMap& world, const SimParams& sim,
                               const InferenceParams& params, Rng rng)
    : world_(world), sim_(sim), params_(params), rng_(rng) {
  if (params_.n_particles < 1)
    throw std::invalid_argument("ParticleFilter: need at least one particle");
  if (!(params_.p_left >= 0.0 && params_.p_left <= 1.0))
    throw std::invalid_argument("ParticleFilter: p_left outside [0,1]");
}

void ParticleFilter::init(const SystemPose& measured,
                          const ControllerState& obstacle_template,
                          const ControllerState& ego_template) {
  const int n = params_.n_particles;
  particles_.assign(static_cast<std::size_t>(n), Particle{});
  std::array<int, 2> counts{0, 0};  // TurnLeft, TurnRight
  for (auto& p : particles_) {
    p.state.pose = measured;
    p.state.belief = Belief{};
    p.state.obstacle_ctrl = obstacle_template;
    p.state.ego_ctrl = ego_template;
    p.state.tick = 0;
    Intent it = rng_.uniform() < params_.p_left ? Intent::TurnLeft : Intent::TurnRight;
    p.state.obstacle_ctrl.intent = it;
    p.state.obstacle_ctrl.path = &world_.path(it);
    ++counts[it == Intent::TurnLeft ? 0 : 1];
    p.weight = 1.0 / n;
  }

  // Keep every nonzero-prior intent represented by at least 1% of particles.
  const std::array<double, 2> priors{params_.p_left, 1.0 - params_.p_left};
  const std::array<Intent, 2> intents{Intent::TurnLeft, Intent::TurnRight};
  const int floor_n = std::max(1, static_cast<int>(std::ceil(0.01 * n)));
  for (int want = 0; want < 2; ++want) {
    if (priors[want] <= 0.0) continue;
    int donor = 1 - want;
    auto it = particles_.rbegin();
    while (counts[want] < floor_n && counts[donor] > floor_n &&
           it != particles_.rend()) {
      if (it->state.obstacle_ctrl.intent == intents[donor]) {
        it->state.obstacle_ctrl.intent = intents[want];
        it->state.obstacle_ctrl.path = &world_.path(intents[want]);
        ++counts[want];
        --counts[donor];
      }
      ++it;
    }
  }
}

void ParticleFilter::propagate(const std::optional<ControlInput>& ego_command) {
  const std::optional<ControlInput> injected =
      params_.generative_ego ? std::nullopt : ego_command;
  for (auto& p : particles_) {
    advance(p.state, world_, sim_, injected, std::nullopt, rng_);
  }
}

void ParticleFilter::weigh(const SystemPose& measured) {
  const std::size_t n = particles_.size();
  std::vector<double> lw(n);
  double max_lw = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    lw[i] = std::log(particles_[i].weight) +
            log_likelihood(particles_[i].state.pose, measured, params_.likelihood);
    max_lw = std::max(max_lw, lw[i]);
  }
  if (max_lw < std::log(std::numeric_limits<double>::min())) {
    for (auto& p : particles_) p.weight = 1.0 / static_cast<double>(n);
    ++stats_.degeneracy_events;
    return;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lw[i] = std::exp(lw[i] - max_lw);
    sum += lw[i];
  }
  for (std::size_t i = 0; i < n; ++i) particles_[i].weight = lw[i] / sum;
}

double ParticleFilter::ess() const {
  double s2 = 0.0;
  for (const auto& p : particles_) s2 += p.weight * p.weight;
  return 1.0 / s2;
}

bool ParticleFilter::maybe_resample() {
  const std::size_t n = particles_.size();
  if (params_.resample == ResamplePolicy::Ess &&
      ess() >= params_.ess_fraction * static_cast<double>(n)) {
    return false;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = particles_[i].weight;
  const double u = rng_.uniform();
  const auto idx = resample_systematic_indices(w, u);
  std::vector<Particle> next;
  next.reserve(n);
  for (std::size_t j : idx) {
    next.push_back(particles_[j]);
    next.back().weight = 1.0 / static_cast<double>(n);
  }
  particles_ = std::move(next);
  ++stats_.resample_count;
  return true;
}

void ParticleFilter::step(const std::optional<ControlInput>& ego_command,
                          const SystemPose& measured) {
  propagate(ego_command);
  weigh(measured);
  maybe_resample();
}

std::array<double, 3> ParticleFilter::intent_posterior() const {
  std::array<double, 3> post{0.0, 0.0, 0.0};
  for (const auto& p : particles_) {
    post[static_cast<std::size_t>(p.state.obstacle_ctrl.intent)] += p.weight;
  }
  return post;
}

Intent ParticleFilter::map_intent() const {
  const auto post = intent_posterior();
  std::size_t best = 0;
  for (std::size_t i = 1; i < post.size(); ++i) {
    if (post[i] > post[best]) best = i;
  }
  return static_cast<Intent>(best);
}

ImminenceReport ParticleFilter::imminence(const VehiclePose& true_ego) {
  ImminenceReport r;
  const auto& bp = sim_.behavior;
  GapAssessment truth = assess_conflict_gap(world_, Intent::TurnLeft, true_ego,
                                            bp.pass_margin_m, &true_ego_hint_);
  if (!truth.has_conflict || truth.passed) return r;
  r.true_ttc = truth.ttc;
  if (truth.ttc > params_.imminent_horizon_s) return r;
  const bool truly_tight = truth.ttc <= bp.gap_threshold_s;

  for (auto& p : particles_) {
    auto& oc = p.state.obstacle_ctrl;
    const bool left = oc.intent == Intent::TurnLeft;
    const bool proceeding = oc.yield_state == YieldState::Proceeding;
    bool believed_clear = true;
    if (p.state.belief.pose) {
      GapAssessment g = assess_conflict_gap(world_, Intent::TurnLeft,
                                            *p.state.belief.pose, bp.pass_margin_m,
                                            &oc.believed_hint);
      believed_clear = g.passed || g.ttc > bp.gap_threshold_s;
    }
    if (left) r.p_intent_left += p.weight;
    if (proceeding) r.p_proceeding += p.weight;
    if (believed_clear) r.p_believed_clear += p.weight;
    if (left && proceeding && truly_tight) r.p += p.weight;
  }
  r.alarm = r.p > params_.imminent_threshold;
  return r;
}

}  // namespace cdf
