#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cdf/dynamics.hpp"
#include "cdf/geometry.hpp"

namespace cdf {

enum class Intent { TurnLeft, TurnRight, Straight };

const char* to_string(Intent intent);

struct Lane {
  std::string name;
  Polyline centerline;  // ordered along the travel direction
  double width = 3.5;
};

// Reference path a controller tracks. Arc sections are flagged so speed
// planning can slow through the turn.
struct Path {
  Intent intent = Intent::Straight;
  Polyline line;
  double turn_start_s = 0.0;
  double turn_end_s = 0.0;     // 0 when the path has no turn
  double stopline_s = -1.0;    // arc length where the path crosses the stop line, -1 if never
};

// Where an obstacle path first enters the ego lane corridor.
struct ConflictInfo {
  Vec2 point;
  double s_on_path = 0.0;      // along the obstacle path
  double s_on_ego_path = 0.0;  // along the ego path
};

struct WorldConfig {
  double lane_width = 3.5;
  double ego_approach_m = 120.0;   // through-road length east of the intersection center
  double ego_depart_m = 40.0;      // through-road length west of it
  double stem_approach_m = 40.0;   // stem length below the road edge
  double turn_radius_m = 6.0;
  double stopline_setback_m = 0.75;
  double waypoint_spacing_m = 0.5;
  std::vector<ConvexPolygon> occluders;
};

// T-intersection: the through road runs along the x axis, the stem joins from
// the south. The ego travels westbound on the north lane; the obstacle waits
// on the stem's northbound lane and either turns left across the intersection
// into the ego's lane or right into the eastbound lane.
class WorldMap {
 public:
  explicit WorldMap(const WorldConfig& cfg);

  const WorldConfig& config() const { return cfg_; }
  const std::vector<Lane>& lanes() const { return lanes_; }
  const Lane& lane(std::size_t id) const;
  std::size_t ego_lane_id() const { return 0; }
  const Segment& stop_line() const { return stop_line_; }
  const std::vector<ConvexPolygon>& occluders() const { return cfg_.occluders; }

  const std::vector<Path>& paths() const { return paths_; }
  const Path& path(Intent intent) const;
  const Path& ego_path() const { return path(Intent::Straight); }

  std::optional<ConflictInfo> conflict(Intent intent) const;

 private:
  WorldConfig cfg_;
  std::vector<Lane> lanes_;
  std::vector<Path> paths_;
  Segment stop_line_;
  std::optional<ConflictInfo> left_conflict_;
};

WorldMap build_t_intersection(const WorldConfig& cfg);

// Line-of-sight between two poses: true when the open sight segment misses
// every occluder's interior. Symmetric in its arguments.
bool isovist_contains(const WorldMap& world, const VehiclePose& observer,
                      const VehiclePose& target);

std::array<Vec2, 4> footprint_corners(const VehiclePose& pose, const Footprint& fp);

bool footprints_collide(const VehiclePose& a, const Footprint& fa,
                        const VehiclePose& b, const Footprint& fb);

double footprint_clearance(const VehiclePose& a, const Footprint& fa,
                           const VehiclePose& b, const Footprint& fb);

// True when any footprint corner lies within the lane corridor
// (centerline +- width/2, closed boundary).
bool in_lane(const WorldMap& world, const VehiclePose& pose, const Footprint& fp,
             std::size_t lane_id);

}  // namespace cdf
