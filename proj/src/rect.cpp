#include "scenegen/rect.hpp"

#include <algorithm>
#include <numbers>

namespace scenegen {

double normalize_heading(double h) {
  constexpr double kTwoPi = 2 * std::numbers::pi;
  if (!std::isfinite(h)) return h;
  double r = std::fmod(h, kTwoPi);
  if (r > std::numbers::pi) r -= kTwoPi;
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

std::array<Point2, 4> OrientedRect::corners() const {
  const Point2 right = heading_right(heading) * half_width;
  const Point2 fwd = heading_dir(heading) * half_length;
  return {center + right + fwd, center - right + fwd, center - right - fwd, center + right - fwd};
}

namespace {

// Half-extent of `r` projected onto unit axis `axis`.
double projected_radius(const OrientedRect& r, Point2 axis) {
  return r.half_width * std::abs(dot(heading_right(r.heading), axis)) +
         r.half_length * std::abs(dot(heading_dir(r.heading), axis));
}

bool separated_on(const OrientedRect& a, const OrientedRect& b, Point2 axis) {
  const double distance = std::abs(dot(b.center - a.center, axis));
  return distance >= projected_radius(a, axis) + projected_radius(b, axis) - kContactTolerance;
}

}  // namespace

bool rects_intersect(const OrientedRect& a, const OrientedRect& b) {
  const std::array<Point2, 4> axes = {heading_right(a.heading), heading_dir(a.heading),
                                      heading_right(b.heading), heading_dir(b.heading)};
  return std::none_of(axes.begin(), axes.end(), [&](Point2 axis) { return separated_on(a, b, axis); });
}

bool rect_contains_point(const OrientedRect& outer, Point2 p, double slack) {
  const Point2 d = p - outer.center;
  return std::abs(dot(d, heading_right(outer.heading))) <= outer.half_width + slack &&
         std::abs(dot(d, heading_dir(outer.heading))) <= outer.half_length + slack;
}

bool rect_contains(const OrientedRect& outer, const OrientedRect& inner) {
  const auto cs = inner.corners();
  return std::all_of(cs.begin(), cs.end(), [&](Point2 c) { return rect_contains_point(outer, c); });
}

}  // namespace scenegen
