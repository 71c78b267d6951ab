#pragma once

#include <span>

#include "phoband/types.hpp"

namespace phoband::geometry {

inline double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

/// Signed area of triangle (a, b, c); positive when counterclockwise.
inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

/// Exact area of (polygon) intersect (disc of `radius` around `center`). The polygon
/// is given counterclockwise; the result is signed like the polygon area.
double polygon_disc_area(std::span<const Vec2> polygon, const Vec2& center, double radius);

}  // namespace phoband::geometry
