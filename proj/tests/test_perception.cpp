#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cdf/perception.hpp"
#include "cdf/world.hpp"

using namespace cdf;

namespace {

WorldMap open_world() { return build_t_intersection(WorldConfig{}); }

WorldMap walled_world() {
  WorldConfig cfg;
  // sits on the sight line between blocked_poses(): that segment crosses the
  // y = [-15, -7] band at x = 17.9 .. 23.3
  cfg.occluders.push_back(ConvexPolygon{{{16, -15}, {24, -15}, {24, -7}, {16, -7}}});
  return build_t_intersection(cfg);
}

SystemPose facing_poses() {
  SystemPose s;
  s.obstacle = {1.75, -6.0, M_PI_2, 0.0};
  s.ego = {40.0, 1.75, M_PI, 13.4};
  return s;
}

SystemPose blocked_poses() {
  SystemPose s;
  s.obstacle = {1.75, -35.0, M_PI_2, 0.0};
  s.ego = {30.0, 1.75, M_PI, 13.4};
  return s;
}

}  // namespace

TEST_CASE("observation gating") {
  WorldMap world = open_world();
  WorldMap walled = walled_world();
  ObservationParams params;

  SUBCASE("beta outside [0,1] is rejected") {
    Rng rng(1);
    params.beta = -0.1;
    CHECK_THROWS_AS(observe(facing_poses(), world, params, rng), std::invalid_argument);
    params.beta = 1.5;
    CHECK_THROWS_AS(observe(facing_poses(), world, params, rng), std::invalid_argument);
  }

  SUBCASE("occlusion blanks the observation even at beta = 1") {
    Rng rng(2);
    params.beta = 1.0;
    for (int i = 0; i < 50; ++i) {
      CHECK_FALSE(observe(blocked_poses(), walled, params, rng).pose.has_value());
    }
    CHECK(observe(blocked_poses(), world, params, rng).pose.has_value());
  }

  SUBCASE("beta = 0 never notices") {
    Rng rng(3);
    params.beta = 0.0;
    for (int i = 0; i < 50; ++i) {
      CHECK_FALSE(observe(facing_poses(), world, params, rng).pose.has_value());
    }
  }

  SUBCASE("the attention coin is drawn whether or not the ego is visible") {
    // Identical streams must stay aligned through a missed and a blocked
    // observation alike; only a successful one consumes noise draws.
    Rng a(77);
    Rng b(77);
    ObservationParams p1;
    p1.beta = 1.0;  // coin says yes, but the wall blocks it
    observe(blocked_poses(), walled, p1, a);
    ObservationParams p2;
    p2.beta = 0.0;  // visible, but the coin says no
    observe(facing_poses(), world, p2, b);
    CHECK(a.uniform() == b.uniform());
  }
}

TEST_CASE("observation noise") {
  WorldMap world = open_world();
  ObservationParams params;
  params.beta = 1.0;

  SUBCASE("zero noise reproduces the ego pose exactly") {
    params.noise_std = {0.0, 0.0, 0.0, 0.0};
    Rng rng(4);
    Observation o = observe(facing_poses(), world, params, rng);
    REQUIRE(o.pose.has_value());
    CHECK(o.pose->x == 40.0);
    CHECK(o.pose->y == 1.75);
    CHECK(o.pose->theta == doctest::Approx(M_PI));
    CHECK(o.pose->v == 13.4);
  }

  SUBCASE("residual statistics match the configured stds") {
    Rng rng(5);
    const int n = 20000;
    double sx = 0, sx2 = 0, sth = 0, sth2 = 0;
    SystemPose sys = facing_poses();
    for (int i = 0; i < n; ++i) {
      Observation o = observe(sys, world, params, rng);
      REQUIRE(o.pose.has_value());
      double dx = o.pose->x - sys.ego.x;
      double dth = std::remainder(o.pose->theta - sys.ego.theta, 2.0 * M_PI);
      sx += dx;
      sx2 += dx * dx;
      sth += dth;
      sth2 += dth * dth;
      CHECK(o.pose->v >= 0.0);
      CHECK(o.pose->theta > -M_PI - 1e-15);
      CHECK(o.pose->theta <= M_PI + 1e-15);
    }
    double mx = sx / n;
    double mth = sth / n;
    CHECK(std::abs(mx) < 0.02);
    CHECK(std::sqrt(sx2 / n - mx * mx) == doctest::Approx(0.5).epsilon(0.03));
    CHECK(std::abs(mth) < 0.002);
    CHECK(std::sqrt(sth2 / n - mth * mth) == doctest::Approx(0.05).epsilon(0.03));
  }
}

TEST_CASE("notice rate converges to beta") {
  WorldMap world = open_world();
  ObservationParams params;
  params.beta = 0.3;
  Rng rng(6);
  const int n = 100000;
  int hits = 0;
  SystemPose sys = facing_poses();
  for (int i = 0; i < n; ++i) {
    if (observe(sys, world, params, rng).pose.has_value()) ++hits;
  }
  double rate = static_cast<double>(hits) / n;
  double se = std::sqrt(params.beta * (1.0 - params.beta) / n);
  CHECK(std::abs(rate - params.beta) < 3.0 * se);
}

TEST_CASE("chance of at least one observation in the first second") {
  // 10 ticks at beta = 0.05: 1 - 0.95^10, about 0.401
  WorldMap world = open_world();
  ObservationParams params;
  params.beta = 0.05;
  Rng rng(7);
  const int trials = 100000;
  int saw = 0;
  SystemPose sys = facing_poses();
  for (int i = 0; i < trials; ++i) {
    bool any = false;
    for (int k = 0; k < 10; ++k) {
      if (observe(sys, world, params, rng).pose.has_value()) any = true;
    }
    if (any) ++saw;
  }
  double rate = static_cast<double>(saw) / trials;
  CHECK(std::abs(rate - (1.0 - std::pow(0.95, 10))) < 0.01);
}

TEST_CASE("belief update") {
  ObservationParams params;
  const double dt = 0.1;

  SUBCASE("empty belief stays empty without an observation") {
    Belief b;
    Belief out = update_belief(b, {}, 5, dt, params);
    CHECK_FALSE(out.pose.has_value());
    CHECK(out.last_update_tick == -1);
  }

  SUBCASE("an observation installs the pose and the tick") {
    Belief b;
    Observation o{VehiclePose{10.0, 1.75, M_PI, 13.0}};
    Belief out = update_belief(b, o, 3, dt, params);
    REQUIRE(out.pose.has_value());
    CHECK(out.pose->x == 10.0);
    CHECK(out.last_update_tick == 3);
  }

  SUBCASE("a stale belief coasts at constant velocity") {
    Belief b{VehiclePose{10.0, 1.75, M_PI, 13.0}, 3};
    Belief out = update_belief(b, {}, 4, dt, params);
    REQUIRE(out.pose.has_value());
    CHECK(out.pose->x == doctest::Approx(10.0 + 13.0 * dt * std::cos(M_PI)).epsilon(1e-12));
    CHECK(out.pose->y == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(out.pose->v == 13.0);
    CHECK(out.pose->theta == doctest::Approx(M_PI));
    // extrapolation does not count as a fresh sighting
    CHECK(out.last_update_tick == 3);

    // k coasting ticks advance x by k * v * dt
    Belief cur = b;
    for (int k = 0; k < 10; ++k) cur = update_belief(cur, {}, 4 + k, dt, params);
    CHECK(cur.pose->x == doctest::Approx(10.0 - 13.0 * dt * 10).epsilon(1e-9));
  }

  SUBCASE("extrapolation can be disabled") {
    ObservationParams frozen = params;
    frozen.belief_extrapolate = false;
    Belief b{VehiclePose{10.0, 1.75, M_PI, 13.0}, 3};
    Belief out = update_belief(b, {}, 9, dt, frozen);
    CHECK(out.pose->x == 10.0);
    CHECK(out.last_update_tick == 3);
  }

  SUBCASE("a belief never reverts to empty") {
    Belief b{VehiclePose{10.0, 1.75, M_PI, 13.0}, 0};
    for (int k = 1; k < 100; ++k) {
      b = update_belief(b, {}, k, dt, params);
      CHECK(b.pose.has_value());
    }
  }

  SUBCASE("a new observation replaces a coasted belief") {
    Belief b{VehiclePose{10.0, 1.75, M_PI, 13.0}, 0};
    b = update_belief(b, {}, 1, dt, params);
    Observation o{VehiclePose{5.0, 1.75, M_PI, 12.0}};
    b = update_belief(b, o, 2, dt, params);
    CHECK(b.pose->x == 5.0);
    CHECK(b.last_update_tick == 2);
  }
}
