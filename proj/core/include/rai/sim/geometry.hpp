#pragma once

#include <cmath>
#include <optional>

namespace rai::sim {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double length() const { return std::hypot(x, y); }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).length(); }

// Axis-aligned box.
struct Box {
  Vec2 min;
  Vec2 max;

  static Box around(Vec2 center, double hx, double hy) {
    return {{center.x - hx, center.y - hy}, {center.x + hx, center.y + hy}};
  }
  Vec2 center() const { return {(min.x + max.x) / 2, (min.y + max.y) / 2}; }
  Box inflated(double d) const { return {{min.x - d, min.y - d}, {max.x + d, max.y + d}}; }
  bool contains(Vec2 p) const { return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y; }
  bool interior_contains(Vec2 p) const { return p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y; }
  // Open interiors intersect; touching edges do not count.
  bool overlaps(const Box& o) const {
    return min.x < o.max.x && o.min.x < max.x && min.y < o.max.y && o.min.y < max.y;
  }
  friend bool operator==(const Box&, const Box&) = default;
};

// Degrees in [0, 360).
double normalize_heading(double degrees);
// Degrees in (-180, 180].
double normalize_bearing(double degrees);
// Heading of the vector from `from` to `to`; 0 is +x, counter-clockwise.
double heading_to(Vec2 from, Vec2 to);
Vec2 unit_from_heading(double degrees);

// Smallest t in [0, 1] at which a + t(b - a) lies in the closure of the box
// while the segment passes through its open interior; nullopt if the segment
// never enters the interior. Grazing an edge or corner is not an entry.
std::optional<double> segment_entry(Vec2 a, Vec2 b, const Box& box);
inline bool segment_crosses(Vec2 a, Vec2 b, const Box& box) { return segment_entry(a, b, box).has_value(); }

double point_box_distance(Vec2 p, const Box& box);
// Minimum distance between a segment and a box (0 if they touch).
double segment_box_distance(Vec2 a, Vec2 b, const Box& box);

// Oriented rectangle: centre, heading in degrees, half length along the
// heading, half width across it.
struct OrientedRect {
  Vec2 center;
  double heading = 0.0;
  double half_length = 0.0;
  double half_width = 0.0;
};

// Separating-axis test; open interiors.
bool intersects(const OrientedRect& rect, const Box& box);

}  // namespace rai::sim
