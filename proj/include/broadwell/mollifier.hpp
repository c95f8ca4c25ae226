#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "broadwell/grid.hpp"

namespace broadwell {

/// Discrete radial bump (1 - (r/R)^2)^3 on the cell offsets with r < R,
/// normalised to unit sum.
class Mollifier {
public:
  Mollifier(Grid grid, double radius) : grid_(grid), radius_(radius) {
    if (!(radius >= 0.0) || !std::isfinite(radius))
      throw std::invalid_argument("Mollifier: radius must be finite and >= 0");
    const double h = grid.spacing();
    reach_ = static_cast<int>(std::floor(radius / h));
    // Offsets of n cells or more never land on the grid; they still count
    // towards the normalisation but are not stored.
    const int stored = std::min(reach_, grid.n_cells() - 1);
    double total = 0.0;
    for (int dy = -reach_; dy <= reach_; ++dy)
      for (int dx = -reach_; dx <= reach_; ++dx) {
        const double r = h * std::sqrt(double(dx) * dx + double(dy) * dy);
        double w = 0.0;
        if (dx == 0 && dy == 0) {
          w = 1.0;
        } else if (r < radius) {
          const double s = 1.0 - (r / radius) * (r / radius);
          w = s * s * s;
        }
        if (w == 0.0) continue;
        total += w;
        if (std::abs(dx) <= stored && std::abs(dy) <= stored) taps_.push_back({dx, dy, w});
      }
    for (auto &t : taps_) t.weight /= total;
  }

  double radius() const noexcept { return radius_; }
  bool is_identity() const noexcept { return taps_.size() == 1; }

  /// Convolution with the fields extended by zero outside the square.
  ScalarField apply(const ScalarField &f) const {
    if (is_identity()) return f;
    const int n = f.n();
    ScalarField out(f.grid());
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        double s = 0.0;
        for (const auto &t : taps_) {
          const int jx = ix + t.dx, jy = iy + t.dy;
          if (jx < 0 || jy < 0 || jx >= n || jy >= n) continue;
          s += t.weight * f(jx, jy);
        }
        out(ix, iy) = s;
      }
    return out;
  }

  FieldQuartet apply(const FieldQuartet &q) const {
    if (is_identity()) return q;
    return FieldQuartet(apply(q[0]), apply(q[1]), apply(q[2]), apply(q[3]));
  }

private:
  struct Tap {
    int dx, dy;
    double weight;
  };

  Grid grid_;
  double radius_;
  int reach_ = 0;
  std::vector<Tap> taps_;
};

inline ScalarField mollify(const ScalarField &f, double radius) {
  return Mollifier(f.grid(), radius).apply(f);
}

} // namespace broadwell
