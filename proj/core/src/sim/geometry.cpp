#include "rai/sim/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace rai::sim {

double normalize_heading(double degrees) {
  double h = std::fmod(degrees, 360.0);
  if (h < 0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  return h;
}

double normalize_bearing(double degrees) {
  double b = normalize_heading(degrees);
  if (b > 180.0) b -= 360.0;
  return b;
}

double heading_to(Vec2 from, Vec2 to) {
  return normalize_heading(std::atan2(to.y - from.y, to.x - from.x) * 180.0 / kPi);
}

Vec2 unit_from_heading(double degrees) {
  const double r = degrees * kPi / 180.0;
  return {std::cos(r), std::sin(r)};
}

std::optional<double> segment_entry(Vec2 a, Vec2 b, const Box& box) {
  const Vec2 d = b - a;
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  const std::array<std::array<double, 4>, 2> axes{{{a.x, d.x, box.min.x, box.max.x},
                                                   {a.y, d.y, box.min.y, box.max.y}}};
  for (const auto& [p, v, lo, hi] : axes) {
    if (v == 0.0) {
      if (!(p > lo && p < hi)) return std::nullopt;
      continue;
    }
    double ta = (lo - p) / v;
    double tb = (hi - p) / v;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  // Inside the open interior on every axis for t in (t0, t1).
  if (!(t0 < t1) || t1 <= 0.0 || t0 >= 1.0) return std::nullopt;
  return std::max(t0, 0.0);
}

double point_box_distance(Vec2 p, const Box& box) {
  const double dx = std::max({box.min.x - p.x, 0.0, p.x - box.max.x});
  const double dy = std::max({box.min.y - p.y, 0.0, p.y - box.max.y});
  return std::hypot(dx, dy);
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = d.dot(d);
  double t = len2 > 0 ? (p - a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + d * t);
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return (q - p).cross(r - p); };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return true;
  auto on = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  return (o1 == 0 && on(a, b, c)) || (o2 == 0 && on(a, b, d)) || (o3 == 0 && on(c, d, a)) ||
         (o4 == 0 && on(c, d, b));
}

}  // namespace

double segment_box_distance(Vec2 a, Vec2 b, const Box& box) {
  if (box.contains(a) || box.contains(b)) return 0.0;
  const std::array<Vec2, 4> c{box.min, Vec2{box.max.x, box.min.y}, box.max, Vec2{box.min.x, box.max.y}};
  for (int i = 0; i < 4; ++i) {
    if (segments_intersect(a, b, c[i], c[(i + 1) % 4])) return 0.0;
  }
  double best = std::min(point_box_distance(a, box), point_box_distance(b, box));
  for (int i = 0; i < 4; ++i) best = std::min(best, point_segment_distance(c[i], a, b));
  return best;
}

bool intersects(const OrientedRect& rect, const Box& box) {
  const Vec2 u = unit_from_heading(rect.heading);
  const Vec2 v{-u.y, u.x};
  const Vec2 bc = box.center();
  const double bhx = (box.max.x - box.min.x) / 2;
  const double bhy = (box.max.y - box.min.y) / 2;
  const Vec2 t = bc - rect.center;
  // Axes: world x, world y, rect u, rect v.
  if (std::abs(t.x) >= bhx + rect.half_length * std::abs(u.x) + rect.half_width * std::abs(v.x)) return false;
  if (std::abs(t.y) >= bhy + rect.half_length * std::abs(u.y) + rect.half_width * std::abs(v.y)) return false;
  if (std::abs(t.dot(u)) >= rect.half_length + bhx * std::abs(u.x) + bhy * std::abs(u.y)) return false;
  if (std::abs(t.dot(v)) >= rect.half_width + bhx * std::abs(v.x) + bhy * std::abs(v.y)) return false;
  return true;
}

}  // namespace rai::sim
