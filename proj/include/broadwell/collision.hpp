#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "broadwell/grid.hpp"

namespace broadwell {

/// Saturating factor u / (1 + u/k), written as u*k/(k+u) so large u does not
/// cancel. Strictly below k for finite u >= 0.
inline double saturate(double u, double k) noexcept { return u * k / (k + u); }

/// Truncated Broadwell collision t(F3)t(F4) - t(F1)t(F2) at one point.
inline double truncated_collision(double f1, double f2, double f3, double f4, double k) noexcept {
  return saturate(f3, k) * saturate(f4, k) - saturate(f1, k) * saturate(f2, k);
}

/// Pointwise truncated collision of a quartet. Positive values feed F1, F2.
inline ScalarField truncated_collision(const FieldQuartet &f, double k) {
  ScalarField q(f.grid());
  auto out = q.values();
  auto f1 = f[0].values(), f2 = f[1].values(), f3 = f[2].values(), f4 = f[3].values();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = truncated_collision(f1[i], f2[i], f3[i], f4[i], k);
  return q;
}

/// Caps every boundary sample at k/2.
inline BoundaryTrace truncate_boundary(const BoundaryTrace &fb, double k) {
  std::array<std::vector<double>, 4> p;
  const double cap = 0.5 * k;
  for (int c = 0; c < 4; ++c) {
    p[c] = fb.profile(c);
    for (double &v : p[c]) v = std::min(v, cap);
  }
  return BoundaryTrace(fb.grid(), std::move(p));
}

} // namespace broadwell
