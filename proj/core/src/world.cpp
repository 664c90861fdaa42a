#include "cdf/world.hpp"

#include <cmath>
#include <stdexcept>

namespace cdf {

const char* to_string(Intent intent) {
  switch (intent) {
    case Intent::TurnLeft: return "turn_left";
    case Intent::TurnRight: return "turn_right";
    case Intent::Straight: return "straight";
  }
  return "?";
}

namespace {

void append_straight(std::vector<Vec2>& pts, Vec2 from, Vec2 to, double spacing) {
  double len = norm(to - from);
  int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
  for (int i = 1; i <= n; ++i) {
    double t = static_cast<double>(i) / n;
    pts.push_back(from + (to - from) * t);
  }
}

// Arc around `center` from angle a0 to a1 (radians, signed sweep).
void append_arc(std::vector<Vec2>& pts, Vec2 center, double radius, double a0,
                double a1, double spacing) {
  double sweep = a1 - a0;
  double arc_len = std::abs(sweep) * radius;
  int n = std::max(2, static_cast<int>(std::ceil(arc_len / spacing)));
  for (int i = 1; i <= n; ++i) {
    double a = a0 + sweep * static_cast<double>(i) / n;
    pts.push_back(center + Vec2{std::cos(a), std::sin(a)} * radius);
  }
}

}  // namespace

WorldMap::WorldMap(const WorldConfig& cfg) : cfg_(cfg) {
  if (cfg.lane_width <= 0.0) throw std::invalid_argument("world: lane_width must be positive");
  if (cfg.ego_approach_m <= 0.0 || cfg.ego_depart_m <= 0.0 || cfg.stem_approach_m <= 0.0)
    throw std::invalid_argument("world: road lengths must be positive");
  if (cfg.turn_radius_m <= 0.0) throw std::invalid_argument("world: turn radius must be positive");
  if (cfg.waypoint_spacing_m <= 0.0 || cfg.waypoint_spacing_m > 1.0)
    throw std::invalid_argument("world: waypoint spacing must be in (0, 1]");

  const double w = cfg.lane_width;
  const double half = w / 2.0;       // lane centerline offset from the road axis
  const double edge = w;             // through-road south edge is y = -w
  const double r = cfg.turn_radius_m;
  const double spacing = cfg.waypoint_spacing_m;
  const double x_east = cfg.ego_approach_m;
  const double x_west = -cfg.ego_depart_m;
  const double y_south = -(edge + cfg.stem_approach_m);

  // Lane 0: ego's westbound lane. Lane 1: eastbound lane. Lane 2: stem
  // northbound approach.
  {
    std::vector<Vec2> pts{{x_east, half}};
    append_straight(pts, {x_east, half}, {x_west, half}, spacing);
    lanes_.push_back({"through_west", Polyline(pts), w});
  }
  {
    std::vector<Vec2> pts{{x_west, -half}};
    append_straight(pts, {x_west, -half}, {x_east, -half}, spacing);
    lanes_.push_back({"through_east", Polyline(pts), w});
  }
  {
    std::vector<Vec2> pts{{half, y_south}};
    append_straight(pts, {half, y_south}, {half, -edge}, spacing);
    lanes_.push_back({"stem_north", Polyline(pts), w});
  }

  const double stop_y = -(edge + cfg.stopline_setback_m);
  stop_line_ = Segment{{0.0, stop_y}, {w, stop_y}};

  // Distance from the stem start to the stop line along the shared straight
  // approach. Both turn paths use this value so the held pose at the line is
  // identical regardless of intent.
  const double approach_stop_s = stop_y - y_south;

  // Obstacle turn paths. Both share the stem approach; the left turn crosses
  // the eastbound lane and merges into the ego's westbound lane, the right
  // turn merges into the eastbound lane without touching the ego's.
  {
    // Left: north along x = half, CCW quarter arc, then west along y = +half.
    double arc_start_y = half - r;
    std::vector<Vec2> pts{{half, y_south}};
    append_straight(pts, {half, y_south}, {half, arc_start_y}, spacing);
    Polyline prefix(pts);
    double turn_start = prefix.length();
    append_arc(pts, {half - r, arc_start_y}, r, 0.0, M_PI / 2.0, spacing);
    Polyline with_arc(pts);
    double turn_end = with_arc.length();
    append_straight(pts, {half - r, arc_start_y + r}, {x_west, half}, spacing);
    Path p;
    p.intent = Intent::TurnLeft;
    p.line = Polyline(pts);
    p.turn_start_s = turn_start;
    p.turn_end_s = turn_end;
    p.stopline_s = approach_stop_s;
    paths_.push_back(std::move(p));
  }
  {
    // Right: north along x = half, CW quarter arc, then east along y = -half.
    double arc_start_y = -half - r;
    std::vector<Vec2> pts{{half, y_south}};
    append_straight(pts, {half, y_south}, {half, arc_start_y}, spacing);
    Polyline prefix(pts);
    double turn_start = prefix.length();
    append_arc(pts, {half + r, arc_start_y}, r, M_PI, M_PI / 2.0, spacing);
    Polyline with_arc(pts);
    double turn_end = with_arc.length();
    append_straight(pts, {half + r, -half}, {x_east, -half}, spacing);
    Path p;
    p.intent = Intent::TurnRight;
    p.line = Polyline(pts);
    p.turn_start_s = turn_start;
    p.turn_end_s = turn_end;
    p.stopline_s = approach_stop_s;
    paths_.push_back(std::move(p));
  }
  {
    // Ego: straight westbound along the north lane centerline.
    std::vector<Vec2> pts{{x_east, half}};
    append_straight(pts, {x_east, half}, {x_west, half}, spacing);
    Path p;
    p.intent = Intent::Straight;
    p.line = Polyline(pts);
    paths_.push_back(std::move(p));
  }

  for (const Path& p : paths_) {
    const auto& s = p.line.arc_length();
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i] - s[i - 1] > 1.0 + 1e-9)
        throw std::logic_error("world: waypoint spacing exceeds 1 m");
    }
  }

  for (const ConvexPolygon& poly : cfg.occluders) {
    if (!poly.is_convex_ccw() || poly.area() <= 0.0)
      throw std::invalid_argument("world: occluders must be convex CCW polygons with positive area");
    for (const Lane& lane : lanes_) {
      for (const Vec2& pt : poly.pts) {
        if (lane.centerline.min_distance(pt) <= lane.width / 2.0)
          throw std::invalid_argument("world: occluder overlaps a lane surface");
      }
      for (const Vec2& pt : lane.centerline.points()) {
        if (poly.contains(pt))
          throw std::invalid_argument("world: occluder overlaps a lane surface");
      }
    }
  }

  // The left-turn conflict: first waypoint inside the ego lane corridor.
  const Path& left = path(Intent::TurnLeft);
  const Lane& ego_lane = lanes_[ego_lane_id()];
  for (std::size_t i = 0; i < left.line.points().size(); ++i) {
    const Vec2& pt = left.line.points()[i];
    if (ego_lane.centerline.min_distance(pt) <= ego_lane.width / 2.0) {
      ConflictInfo info;
      info.point = pt;
      info.s_on_path = left.line.arc_length()[i];
      info.s_on_ego_path = ego_path().line.project(pt).s;
      left_conflict_ = info;
      break;
    }
  }
}

const Lane& WorldMap::lane(std::size_t id) const {
  if (id >= lanes_.size()) throw std::out_of_range("world: unknown lane id");
  return lanes_[id];
}

const Path& WorldMap::path(Intent intent) const {
  for (const Path& p : paths_) {
    if (p.intent == intent) return p;
  }
  throw std::out_of_range("world: no path for intent");
}

std::optional<ConflictInfo> WorldMap::conflict(Intent intent) const {
  if (intent == Intent::TurnLeft) return left_conflict_;
  return std::nullopt;
}

WorldMap build_t_intersection(const WorldConfig& cfg) { return WorldMap(cfg); }

bool isovist_contains(const WorldMap& world, const VehiclePose& observer,
                      const VehiclePose& target) {
  Vec2 a{observer.x, observer.y};
  Vec2 b{target.x, target.y};
  for (const ConvexPolygon& poly : world.occluders()) {
    if (segment_crosses_interior(a, b, poly)) return false;
  }
  return true;
}

std::array<Vec2, 4> footprint_corners(const VehiclePose& pose, const Footprint& fp) {
  double to_center = fp.length / 2.0 - fp.rear_axle_offset;
  Vec2 center{pose.x + to_center * std::cos(pose.theta),
              pose.y + to_center * std::sin(pose.theta)};
  return oriented_rect_corners(center, pose.theta, fp.length, fp.width);
}

bool footprints_collide(const VehiclePose& a, const Footprint& fa,
                        const VehiclePose& b, const Footprint& fb) {
  if (fa.length <= 0.0 || fa.width <= 0.0 || fb.length <= 0.0 || fb.width <= 0.0)
    throw std::invalid_argument("footprints_collide: non-positive dimensions");
  return rects_overlap(footprint_corners(a, fa), footprint_corners(b, fb));
}

double footprint_clearance(const VehiclePose& a, const Footprint& fa,
                           const VehiclePose& b, const Footprint& fb) {
  return rect_clearance(footprint_corners(a, fa), footprint_corners(b, fb));
}

bool in_lane(const WorldMap& world, const VehiclePose& pose, const Footprint& fp,
             std::size_t lane_id) {
  const Lane& lane = world.lane(lane_id);
  for (const Vec2& corner : footprint_corners(pose, fp)) {
    if (lane.centerline.min_distance(corner) <= lane.width / 2.0) return true;
  }
  return false;
}

}  // namespace cdf
