#include "cdf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdf {

double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 <= 0.0) return norm(p - a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

static int orient_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
  double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

static bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  int o1 = orient_sign(a, b, c);
  int o2 = orient_sign(a, b, d);
  int o3 = orient_sign(c, d, a);
  int o4 = orient_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool ConvexPolygon::contains(const Vec2& p) const {
  if (pts.size() < 3) return false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % pts.size()];
    if (cross(b - a, p - a) < 0.0) return false;
  }
  return true;
}

double ConvexPolygon::area() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % pts.size()];
    acc += cross(a, b);
  }
  return 0.5 * acc;
}

bool ConvexPolygon::is_convex_ccw() const {
  if (pts.size() < 3) return false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % pts.size()];
    const Vec2& c = pts[(i + 2) % pts.size()];
    if (cross(b - a, c - b) <= 0.0) return false;
  }
  return true;
}

bool segment_crosses_interior(const Vec2& a, const Vec2& b, const ConvexPolygon& poly) {
  if (poly.pts.size() < 3) return false;
  // Clip the segment parameter interval against each edge half-plane. The
  // surviving interval is the part of the segment inside the polygon; a
  // crossing requires it to have positive measure.
  double tmin = 0.0;
  double tmax = 1.0;
  Vec2 d = b - a;
  for (std::size_t i = 0; i < poly.pts.size(); ++i) {
    const Vec2& p0 = poly.pts[i];
    const Vec2& p1 = poly.pts[(i + 1) % poly.pts.size()];
    Vec2 edge = p1 - p0;
    Vec2 inward{-edge.y, edge.x};  // CCW polygon: inward normal is left of edge
    double denom = dot(inward, d);
    double num = dot(inward, a - p0);
    if (std::abs(denom) < 1e-15) {
      // Parallel to this edge: outside its half-plane, or riding exactly on
      // the supporting line (which never enters a convex interior).
      if (num <= 0.0) return false;
      continue;
    }
    double t = -num / denom;
    if (denom > 0.0) {
      tmin = std::max(tmin, t);
    } else {
      tmax = std::min(tmax, t);
    }
    if (tmin >= tmax) return false;
  }
  return (tmax - tmin) > 1e-12;
}

std::array<Vec2, 4> oriented_rect_corners(const Vec2& center, double heading,
                                          double length, double width) {
  double c = std::cos(heading);
  double s = std::sin(heading);
  Vec2 fwd{c, s};
  Vec2 left{-s, c};
  Vec2 f = fwd * (0.5 * length);
  Vec2 l = left * (0.5 * width);
  return {center + f + l, center - f + l, center - f - l, center + f - l};
}

static bool axis_separates(const Vec2& axis, const std::array<Vec2, 4>& a,
                           const std::array<Vec2, 4>& b) {
  double amin = std::numeric_limits<double>::infinity();
  double amax = -amin;
  double bmin = amin;
  double bmax = -amin;
  for (const Vec2& p : a) {
    double v = dot(axis, p);
    amin = std::min(amin, v);
    amax = std::max(amax, v);
  }
  for (const Vec2& p : b) {
    double v = dot(axis, p);
    bmin = std::min(bmin, v);
    bmax = std::max(bmax, v);
  }
  return amax < bmin || bmax < amin;
}

bool rects_overlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  const std::array<Vec2, 4> axes = {
      a[0] - a[1], a[1] - a[2], b[0] - b[1], b[1] - b[2]};
  for (const Vec2& e : axes) {
    Vec2 axis{-e.y, e.x};
    if (axis_separates(axis, a, b)) return false;
  }
  return true;
}

double rect_clearance(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  if (rects_overlap(a, b)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(a[i], b[j], b[(j + 1) % 4]));
      best = std::min(best, point_segment_distance(b[i], a[j], a[(j + 1) % 4]));
    }
  }
  return best;
}

Polyline::Polyline(std::vector<Vec2> pts) : pts_(std::move(pts)) {
  if (pts_.size() < 2) throw std::invalid_argument("polyline needs at least two points");
  s_.resize(pts_.size());
  s_[0] = 0.0;
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    double d = norm(pts_[i] - pts_[i - 1]);
    if (d <= 0.0) throw std::invalid_argument("polyline has a zero-length segment");
    s_[i] = s_[i - 1] + d;
  }
}

Vec2 Polyline::point_at(double s) const {
  if (s <= 0.0) return pts_.front();
  if (s >= length()) return pts_.back();
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - s_.begin()) - 1;
  double t = (s - s_[i]) / (s_[i + 1] - s_[i]);
  return pts_[i] + (pts_[i + 1] - pts_[i]) * t;
}

double Polyline::heading_at(double s) const {
  std::size_t i;
  if (s <= 0.0) {
    i = 0;
  } else if (s >= length()) {
    i = segment_count() - 1;
  } else {
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    i = static_cast<std::size_t>(it - s_.begin()) - 1;
  }
  Vec2 d = pts_[i + 1] - pts_[i];
  return std::atan2(d.y, d.x);
}

Polyline::Projection Polyline::project_range(const Vec2& p, std::size_t lo,
                                             std::size_t hi) const {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = lo; i < hi; ++i) {
    Vec2 a = pts_[i];
    Vec2 ab = pts_[i + 1] - a;
    double len2 = dot(ab, ab);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    Vec2 q = a + ab * t;
    double d = norm(p - q);
    if (d < best.distance) {
      best.distance = d;
      best.s = s_[i] + t * std::sqrt(len2);
      best.hint = i;
    }
  }
  return best;
}

Polyline::Projection Polyline::project(const Vec2& p, std::size_t hint) const {
  std::size_t n = segment_count();
  if (hint == kNoHint || n <= 24) return project_range(p, 0, n);
  // Motion between successive queries is a few segments at most, so a small
  // window around the previous result is almost always enough.
  constexpr std::size_t kBack = 4;
  constexpr std::size_t kFwd = 16;
  std::size_t lo = hint > kBack ? hint - kBack : 0;
  std::size_t hi = std::min(n, hint + kFwd);
  Projection w = project_range(p, lo, hi);
  bool at_edge = (w.hint == lo && lo > 0) || (w.hint + 1 == hi && hi < n);
  if (at_edge) return project_range(p, 0, n);
  return w;
}

}  // namespace cdf
