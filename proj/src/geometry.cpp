#include "phoband/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace phoband::geometry {

namespace {

// Signed area of disc(0, r) intersect triangle(0, a, b).
double wedge_area(const Vec2& a, const Vec2& b, double r) {
  const Vec2 d{b[0] - a[0], b[1] - a[1]};
  const double qa = d[0] * d[0] + d[1] * d[1];
  if (qa == 0.0) return 0.0;
  const double qb = 2.0 * (a[0] * d[0] + a[1] * d[1]);
  const double qc = a[0] * a[0] + a[1] * a[1] - r * r;

  std::array<double, 4> ts{0.0, 0.0, 0.0, 1.0};
  int count = 1;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    for (double t : {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)}) {
      if (t > 0.0 && t < 1.0) ts[count++] = t;
    }
  }
  ts[count++] = 1.0;

  double area = 0.0;
  for (int s = 0; s + 1 < count; ++s) {
    const double t0 = ts[s], t1 = ts[s + 1];
    if (t1 <= t0) continue;
    const Vec2 p{a[0] + t0 * d[0], a[1] + t0 * d[1]};
    const Vec2 q{a[0] + t1 * d[0], a[1] + t1 * d[1]};
    const double tm = 0.5 * (t0 + t1);
    const Vec2 m{a[0] + tm * d[0], a[1] + tm * d[1]};
    if (m[0] * m[0] + m[1] * m[1] <= r * r) {
      area += 0.5 * cross(p, q);
    } else {
      const double angle = std::atan2(cross(p, q), p[0] * q[0] + p[1] * q[1]);
      area += 0.5 * r * r * angle;
    }
  }
  return area;
}

}  // namespace

double polygon_disc_area(std::span<const Vec2> polygon, const Vec2& center, double radius) {
  if (radius <= 0.0 || polygon.size() < 3) return 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2& p = polygon[i];
    const Vec2& q = polygon[(i + 1) % polygon.size()];
    area += wedge_area({p[0] - center[0], p[1] - center[1]}, {q[0] - center[0], q[1] - center[1]}, radius);
  }
  return area;
}

}  // namespace phoband::geometry
