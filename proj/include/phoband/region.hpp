#pragma once

#include <array>
#include <cmath>

#include "phoband/types.hpp"

namespace phoband {

/// Axis-aligned square in the complex frequency plane.
struct SearchRegion {
  cplx center{0.0, 0.0};
  double half_side = 1.0;
  int level = 0;

  /// Radius of the circumscribing circle.
  double radius() const { return half_side * std::sqrt(2.0); }
  double diameter() const { return 2.0 * radius(); }

  bool contains(cplx z) const {
    return std::abs(z.real() - center.real()) <= half_side &&
           std::abs(z.imag() - center.imag()) <= half_side;
  }

  /// The four quadrants, ordered (SW, SE, NW, NE).
  std::array<SearchRegion, 4> children() const {
    const double h = half_side / 2.0;
    const int l = level + 1;
    return {SearchRegion{center + cplx(-h, -h), h, l}, SearchRegion{center + cplx(h, -h), h, l},
            SearchRegion{center + cplx(-h, h), h, l}, SearchRegion{center + cplx(h, h), h, l}};
  }

  /// Square spanning [re_lo, re_hi] x [im_lo, im_hi]; the longer side wins if not square.
  static SearchRegion from_bounds(double re_lo, double re_hi, double im_lo, double im_hi) {
    const double hs = 0.5 * std::max(re_hi - re_lo, im_hi - im_lo);
    return SearchRegion{cplx(0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)), hs, 0};
  }
};

}  // namespace phoband
