#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <vector>

namespace cdf {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
double norm(const Vec2& a);

struct Segment {
  Vec2 a;
  Vec2 b;
};

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

// Proper or touching intersection of two closed segments.
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

// Counter-clockwise convex polygon.
struct ConvexPolygon {
  std::vector<Vec2> pts;

  bool contains(const Vec2& p) const;  // closed
  double area() const;
  bool is_convex_ccw() const;
};

// True when the open segment (a, b) passes through the polygon's interior.
// Grazing contact along an edge or vertex does not count.
bool segment_crosses_interior(const Vec2& a, const Vec2& b, const ConvexPolygon& poly);

// Corners of an oriented rectangle, counter-clockwise starting front-left.
std::array<Vec2, 4> oriented_rect_corners(const Vec2& center, double heading,
                                          double length, double width);

// Separating-axis overlap test for two oriented rectangles (closed: touching
// counts as overlap).
bool rects_overlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b);

// Euclidean clearance between two rectangles, zero when they overlap.
double rect_clearance(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b);

// Piecewise-linear path with cached cumulative arc length.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> pts);

  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<double>& arc_length() const { return s_; }
  double length() const { return s_.empty() ? 0.0 : s_.back(); }
  std::size_t segment_count() const { return pts_.size() < 2 ? 0 : pts_.size() - 1; }

  Vec2 point_at(double s) const;     // clamped to [0, length]
  double heading_at(double s) const; // heading of the segment containing s

  static constexpr std::size_t kNoHint = std::numeric_limits<std::size_t>::max();

  struct Projection {
    double s = 0.0;       // arc length of the closest point
    double distance = 0.0;
    std::size_t hint = 0; // segment index, reusable for the next query
  };

  // Closest point on the polyline. With a hint, only a window of segments
  // around the hinted index is searched; the search falls back to a full scan
  // when the window result is unreliable.
  Projection project(const Vec2& p, std::size_t hint = kNoHint) const;

  double min_distance(const Vec2& p) const { return project(p).distance; }

 private:
  Projection project_range(const Vec2& p, std::size_t lo, std::size_t hi) const;

  std::vector<Vec2> pts_;
  std::vector<double> s_;
};

}  // namespace cdf
