#pragma once

#include <array>
#include <cmath>

namespace scenegen {

struct Point2 {
  double x = 0, y = 0;

  Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double k) const { return {x * k, y * k}; }
  bool operator==(const Point2&) const = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

// Heading convention: 0 faces +y, counterclockwise positive.
inline Point2 heading_dir(double h) { return {-std::sin(h), std::cos(h)}; }
inline Point2 heading_right(double h) { return {std::cos(h), std::sin(h)}; }
inline Point2 rotate(Point2 v, double h) {
  const double c = std::cos(h), s = std::sin(h);
  return {v.x * c - v.y * s, v.x * s + v.y * c};
}

/// Maps any angle to (-pi, pi].
double normalize_heading(double h);

/// A rectangle with half_width along its local x (right) axis and half_length
/// along its local y (forward) axis.
struct OrientedRect {
  Point2 center;
  double heading = 0;
  double half_width = 0;
  double half_length = 0;

  std::array<Point2, 4> corners() const;
  bool operator==(const OrientedRect&) const = default;
};

inline constexpr double kContactTolerance = 1e-9;

/// Separating-axis test over the four edge normals. Rectangles that only touch
/// (overlap within kContactTolerance) do not intersect.
bool rects_intersect(const OrientedRect& a, const OrientedRect& b);

/// True when every corner of `inner` lies inside `outer` (with kContactTolerance slack).
bool rect_contains(const OrientedRect& outer, const OrientedRect& inner);
bool rect_contains_point(const OrientedRect& outer, Point2 p, double slack = kContactTolerance);

}  // namespace scenegen
