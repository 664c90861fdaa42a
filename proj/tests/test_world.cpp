#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <set>

#include "cdf/rng.hpp"
#include "cdf/world.hpp"

using namespace cdf;

namespace {

WorldConfig defaults() { return WorldConfig{}; }

}  // namespace

TEST_CASE("t-intersection layout") {
  WorldMap world = build_t_intersection(defaults());

  SUBCASE("three paths, one per intent") {
    std::set<Intent> intents;
    for (const Path& p : world.paths()) intents.insert(p.intent);
    CHECK(world.paths().size() == 3);
    CHECK(intents.size() == 3);
  }

  SUBCASE("ego path runs westbound along the north lane") {
    const Path& ego = world.ego_path();
    CHECK(ego.intent == Intent::Straight);
    CHECK(ego.line.points().front().x > ego.line.points().back().x);
    for (const Vec2& p : ego.line.points()) CHECK(p.y == doctest::Approx(1.75));
    CHECK(ego.line.heading_at(1.0) == doctest::Approx(M_PI));
    CHECK(ego.stopline_s == -1.0);
    CHECK(ego.turn_end_s == 0.0);
  }

  SUBCASE("turn paths cross the stop line before their arcs end") {
    for (Intent it : {Intent::TurnLeft, Intent::TurnRight}) {
      const Path& p = world.path(it);
      CHECK(p.stopline_s > 0.0);
      CHECK(p.stopline_s < p.turn_end_s);
      CHECK(p.turn_end_s > p.turn_start_s);
      CHECK(p.line.length() > p.turn_end_s);
    }
    // both intents share the same straight approach, so the held pose at the
    // stop line does not leak the intent
    CHECK(world.path(Intent::TurnLeft).stopline_s ==
          doctest::Approx(world.path(Intent::TurnRight).stopline_s));
    // the left arc begins at the stop line; the right arc begins earlier
    const Path& left = world.path(Intent::TurnLeft);
    const Path& right = world.path(Intent::TurnRight);
    CHECK(left.turn_start_s == doctest::Approx(left.stopline_s).epsilon(1e-9));
    CHECK(right.turn_start_s < right.stopline_s);
  }

  SUBCASE("stop line sits below the south road edge") {
    const Segment& sl = world.stop_line();
    double expect_y = -(defaults().lane_width + defaults().stopline_setback_m);
    CHECK(sl.a.y == doctest::Approx(expect_y));
    CHECK(sl.b.y == doctest::Approx(expect_y));
  }

  SUBCASE("ego lane is lane 0") {
    CHECK(world.ego_lane_id() == 0);
    CHECK(world.lane(0).width == doctest::Approx(3.5));
    CHECK_THROWS_AS(world.lane(99), std::out_of_range);
  }
}

TEST_CASE("conflict point against a dense scan oracle") {
  WorldMap world = build_t_intersection(defaults());
  const Lane& ego_lane = world.lane(world.ego_lane_id());
  const double half = ego_lane.width / 2.0;

  auto conflict = world.conflict(Intent::TurnLeft);
  REQUIRE(conflict.has_value());
  CHECK_FALSE(world.conflict(Intent::TurnRight).has_value());
  CHECK_FALSE(world.conflict(Intent::Straight).has_value());

  // first arc length at which the left path pierces the ego corridor
  const Path& left = world.path(Intent::TurnLeft);
  double s_oracle = -1.0;
  for (double s = 0.0; s <= left.line.length(); s += 0.01) {
    if (ego_lane.centerline.min_distance(left.line.point_at(s)) <= half) {
      s_oracle = s;
      break;
    }
  }
  REQUIRE(s_oracle >= 0.0);
  // the map stores the first waypoint inside, so agreement is up to spacing
  CHECK(std::abs(conflict->s_on_path - s_oracle) <= defaults().waypoint_spacing_m + 1e-6);
  CHECK(ego_lane.centerline.min_distance(conflict->point) <= half + 1e-9);

  // the stored ego-path arc length matches a direct projection
  auto proj = world.ego_path().line.project(conflict->point);
  CHECK(conflict->s_on_ego_path == doctest::Approx(proj.s).epsilon(1e-12));

  // the left path enters the corridor once and stays in it (it merges)
  bool inside = false;
  int entries = 0;
  for (double s = 0.0; s <= left.line.length(); s += 0.01) {
    bool now = ego_lane.centerline.min_distance(left.line.point_at(s)) <= half;
    if (now && !inside) ++entries;
    inside = now;
  }
  CHECK(entries == 1);
  CHECK(inside);

  // the right path's centerline never enters the ego corridor
  const Path& right = world.path(Intent::TurnRight);
  for (double s = 0.0; s <= right.line.length(); s += 0.01) {
    CHECK(ego_lane.centerline.min_distance(right.line.point_at(s)) > half);
  }
}

TEST_CASE("world rejects bad configs") {
  WorldConfig cfg = defaults();
  cfg.lane_width = 0.0;
  CHECK_THROWS_AS(build_t_intersection(cfg), std::invalid_argument);

  cfg = defaults();
  cfg.turn_radius_m = -1.0;
  CHECK_THROWS_AS(build_t_intersection(cfg), std::invalid_argument);

  cfg = defaults();
  cfg.waypoint_spacing_m = 0.0;
  CHECK_THROWS_AS(build_t_intersection(cfg), std::invalid_argument);

  cfg = defaults();
  cfg.occluders.push_back(ConvexPolygon{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}});  // CW
  CHECK_THROWS_AS(build_t_intersection(cfg), std::invalid_argument);
}

TEST_CASE("footprint corners and collision") {
  Footprint fp;  // 4.5 x 1.8, rear axle 1.0 from the rear bumper

  SUBCASE("corners sit where the rear axle offset says") {
    VehiclePose pose{0, 0, 0, 0};
    auto c = footprint_corners(pose, fp);
    double front = fp.length - fp.rear_axle_offset;
    double rear = -fp.rear_axle_offset;
    CHECK(c[0].x == doctest::Approx(front));
    CHECK(c[0].y == doctest::Approx(fp.width / 2.0));
    CHECK(c[1].x == doctest::Approx(rear));
    CHECK(c[2].y == doctest::Approx(-fp.width / 2.0));
  }

  SUBCASE("collision is symmetric and reflexive") {
    VehiclePose a{0, 0, 0.3, 0};
    VehiclePose b{3.0, 0.5, -0.2, 0};
    VehiclePose far{30, 30, 1.0, 0};
    CHECK(footprints_collide(a, fp, a, fp));
    CHECK(footprints_collide(a, fp, b, fp) == footprints_collide(b, fp, a, fp));
    CHECK(footprints_collide(a, fp, b, fp));
    CHECK_FALSE(footprints_collide(a, fp, far, fp));
  }

  SUBCASE("clearance between two aligned cars") {
    VehiclePose a{0, 0, 0, 0};
    VehiclePose b{10, 0, 0, 0};
    // rear axle gap minus front overhang of a minus rear overhang of b
    double expect = 10.0 - (fp.length - fp.rear_axle_offset) - fp.rear_axle_offset;
    CHECK(footprint_clearance(a, fp, b, fp) == doctest::Approx(expect));
    CHECK(footprint_clearance(a, fp, a, fp) == 0.0);
  }

  SUBCASE("degenerate footprints are rejected") {
    Footprint bad = fp;
    bad.width = 0.0;
    VehiclePose a{0, 0, 0, 0};
    CHECK_THROWS_AS(footprints_collide(a, bad, a, fp), std::invalid_argument);
  }
}

TEST_CASE("lane membership") {
  WorldMap world = build_t_intersection(defaults());
  Footprint fp;

  // on the ego centerline
  CHECK(in_lane(world, {10.0, 1.75, M_PI, 0.0}, fp, 0));
  // a full road width to the south, heading parallel
  CHECK_FALSE(in_lane(world, {10.0, -5.25, M_PI, 0.0}, fp, 0));
  // corner exactly on the lane boundary, body outside: boundary is closed
  CHECK(in_lane(world, {10.0, -0.9, M_PI, 0.0}, fp, 0));
  // nudged just outside
  CHECK_FALSE(in_lane(world, {10.0, -0.91, M_PI, 0.0}, fp, 0));
  CHECK_THROWS_AS(in_lane(world, {0, 0, 0, 0}, fp, 7), std::out_of_range);
}

TEST_CASE("line of sight") {
  SUBCASE("no occluders means full visibility") {
    WorldMap world = build_t_intersection(defaults());
    CHECK(isovist_contains(world, {50, 1.75, M_PI, 0}, {1.75, -20, M_PI_2, 0}));
  }

  SUBCASE("an occluder between the poses blocks sight, symmetrically") {
    WorldConfig cfg = defaults();
    // block the diagonal between the ego approach and the stem, away from
    // lanes: the ego-to-hidden segment crosses y = [-15, -7] at x = 17.9 .. 23.3
    cfg.occluders.push_back(
        ConvexPolygon{{{16, -15}, {24, -15}, {24, -7}, {16, -7}}});
    WorldMap world = build_t_intersection(cfg);
    VehiclePose ego{30.0, 1.75, M_PI, 0};
    VehiclePose still_seen{1.75, -6.0, M_PI_2, 0};
    VehiclePose hidden{1.75, -35.0, M_PI_2, 0};

    CHECK(isovist_contains(world, ego, still_seen));
    CHECK_FALSE(isovist_contains(world, ego, hidden));
    CHECK(isovist_contains(world, still_seen, ego));
    CHECK_FALSE(isovist_contains(world, hidden, ego));

    // removing the occluder never removes visibility
    WorldMap open_world = build_t_intersection(defaults());
    Rng rng(886);
    for (int i = 0; i < 300; ++i) {
      VehiclePose a{rng.uniform(-30, 110), rng.uniform(-30, 6), 0, 0};
      VehiclePose b{rng.uniform(-30, 110), rng.uniform(-30, 6), 0, 0};
      if (isovist_contains(world, a, b)) CHECK(isovist_contains(open_world, a, b));
    }
  }
}
