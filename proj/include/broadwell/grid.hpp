#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace broadwell {

/// Uniform cell-centred discretisation of [0,1] used on both axes.
class Grid {
public:
  explicit Grid(int n_cells) : n_(n_cells) {
    if (n_cells < 2)
      throw std::invalid_argument("Grid: n_cells must be >= 2, got " +
                                  std::to_string(n_cells));
  }

  int n_cells() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / n_; }
  double center(int i) const noexcept { return (i + 0.5) / n_; }

  friend bool operator==(const Grid &, const Grid &) = default;

private:
  int n_;
};

/// Four discrete velocities of the model. The enumerator value is the
/// component index (F1..F4 map to 0..3).
enum class Direction : int { x_forward = 0, x_backward = 1, y_forward = 2, y_backward = 3 };

inline constexpr std::array<Direction, 4> all_directions{
    Direction::x_forward, Direction::x_backward, Direction::y_forward, Direction::y_backward};

constexpr int index_of(Direction d) noexcept { return static_cast<int>(d); }
constexpr bool along_x(Direction d) noexcept {
  return d == Direction::x_forward || d == Direction::x_backward;
}
constexpr bool is_forward(Direction d) noexcept {
  return d == Direction::x_forward || d == Direction::y_forward;
}

/// Real-valued field sampled at the n x n cell centres, indexed (ix, iy).
class ScalarField {
public:
  explicit ScalarField(Grid grid, double value = 0.0)
      : grid_(grid), data_(static_cast<std::size_t>(grid.n_cells()) * grid.n_cells(), value) {}

  const Grid &grid() const noexcept { return grid_; }
  int n() const noexcept { return grid_.n_cells(); }

  double &operator()(int ix, int iy) noexcept { return data_[offset(ix, iy)]; }
  double operator()(int ix, int iy) const noexcept { return data_[offset(ix, iy)]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  /// Samples along the characteristic line `line` of a direction, in order
  /// of increasing coordinate.
  std::vector<double> line(Direction d, int line) const {
    std::vector<double> out(static_cast<std::size_t>(n()));
    for (int s = 0; s < n(); ++s)
      out[s] = along_x(d) ? (*this)(s, line) : (*this)(line, s);
    return out;
  }

  void set_line(Direction d, int line, std::span<const double> v) {
    for (int s = 0; s < n(); ++s) {
      if (along_x(d))
        (*this)(s, line) = v[s];
      else
        (*this)(line, s) = v[s];
    }
  }

  bool all_finite() const noexcept {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double min_value() const noexcept {
    double m = data_.front();
    for (double v : data_) m = std::min(m, v);
    return m;
  }

  double max_value() const noexcept {
    double m = data_.front();
    for (double v : data_) m = std::max(m, v);
    return m;
  }

private:
  std::size_t offset(int ix, int iy) const noexcept {
    return static_cast<std::size_t>(iy) * grid_.n_cells() + ix;
  }

  Grid grid_;
  std::vector<double> data_;
};

/// The solver state: densities F1..F4 on the grid.
class FieldQuartet {
public:
  explicit FieldQuartet(Grid grid, double value = 0.0)
      : fields_{ScalarField(grid, value), ScalarField(grid, value), ScalarField(grid, value),
                ScalarField(grid, value)} {}

  FieldQuartet(ScalarField f1, ScalarField f2, ScalarField f3, ScalarField f4)
      : fields_{std::move(f1), std::move(f2), std::move(f3), std::move(f4)} {
    for (const auto &f : fields_)
      if (!(f.grid() == fields_[0].grid()))
        throw std::invalid_argument("FieldQuartet: components on different grids");
  }

  const Grid &grid() const noexcept { return fields_[0].grid(); }
  int n() const noexcept { return grid().n_cells(); }

  ScalarField &operator[](int i) noexcept { return fields_[i]; }
  const ScalarField &operator[](int i) const noexcept { return fields_[i]; }
  ScalarField &operator[](Direction d) noexcept { return fields_[index_of(d)]; }
  const ScalarField &operator[](Direction d) const noexcept { return fields_[index_of(d)]; }

  double min_value() const noexcept {
    double m = fields_[0].min_value();
    for (const auto &f : fields_) m = std::min(m, f.min_value());
    return m;
  }

  double max_value() const noexcept {
    double m = fields_[0].max_value();
    for (const auto &f : fields_) m = std::max(m, f.max_value());
    return m;
  }

private:
  std::array<ScalarField, 4> fields_;
};

/// Throws if any entry is negative or non-finite. Called on every quartet an
/// operation produces.
inline void require_nonnegative(const FieldQuartet &q, const char *where) {
  for (int c = 0; c < 4; ++c)
    for (double v : q[c].values())
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::logic_error(std::string(where) + ": component F" + std::to_string(c + 1) +
                               " has a negative or non-finite entry");
}

/// Midpoint quadrature of a field over the unit square.
inline double mass(const ScalarField &f) noexcept {
  double s = 0.0;
  for (double v : f.values()) s += v;
  const double h = f.grid().spacing();
  return s * h * h;
}

inline double mass(const FieldQuartet &q) noexcept {
  return mass(q[0]) + mass(q[1]) + mass(q[2]) + mass(q[3]);
}

inline double l1_distance(const ScalarField &a, const ScalarField &b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("l1_distance: grid mismatch");
  double s = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) s += std::abs(va[i] - vb[i]);
  const double h = a.grid().spacing();
  return s * h * h;
}

inline double l1_distance(const FieldQuartet &a, const FieldQuartet &b) {
  double s = 0.0;
  for (int c = 0; c < 4; ++c) s += l1_distance(a[c], b[c]);
  return s;
}

inline double linf_distance(const FieldQuartet &a, const FieldQuartet &b) {
  double m = 0.0;
  for (int c = 0; c < 4; ++c) {
    auto va = a[c].values();
    auto vb = b[c].values();
    for (std::size_t i = 0; i < va.size(); ++i) m = std::max(m, std::abs(va[i] - vb[i]));
  }
  return m;
}

/// Inflow profiles on the four inflow faces: fb1(y) at x = 0, fb2(y) at x = 1,
/// fb3(x) at y = 0, fb4(x) at y = 1, each sampled at the n cell centres.
class BoundaryTrace {
public:
  BoundaryTrace(Grid grid, std::array<std::vector<double>, 4> profiles)
      : grid_(grid), profiles_(std::move(profiles)) {
    for (int c = 0; c < 4; ++c) {
      if (static_cast<int>(profiles_[c].size()) != grid.n_cells())
        throw std::invalid_argument("BoundaryTrace: profile fb" + std::to_string(c + 1) +
                                    " has wrong length");
      for (double v : profiles_[c])
        if (!std::isfinite(v) || v < 0.0)
          throw std::invalid_argument("BoundaryTrace: profile fb" + std::to_string(c + 1) +
                                      " has a negative or non-finite sample");
    }
  }

  static BoundaryTrace constant(Grid grid, std::array<double, 4> values) {
    std::array<std::vector<double>, 4> p;
    for (int c = 0; c < 4; ++c)
      p[c].assign(static_cast<std::size_t>(grid.n_cells()), values[c]);
    return BoundaryTrace(grid, std::move(p));
  }

  const Grid &grid() const noexcept { return grid_; }
  const std::vector<double> &profile(int c) const noexcept { return profiles_[c]; }
  const std::vector<double> &profile(Direction d) const noexcept {
    return profiles_[index_of(d)];
  }
  double value(Direction d, int line) const noexcept { return profiles_[index_of(d)][line]; }

  /// Quadrature of sum_i int fb_i.
  double mass() const noexcept {
    double s = 0.0;
    for (const auto &p : profiles_)
      for (double v : p) s += v;
    return s * grid_.spacing();
  }

  /// Quadrature of sum_i int fb_i ln+ fb_i.
  double entropy() const noexcept {
    double s = 0.0;
    for (const auto &p : profiles_)
      for (double v : p)
        if (v > 1.0) s += v * std::log(v);
    return s * grid_.spacing();
  }

private:
  Grid grid_;
  std::array<std::vector<double>, 4> profiles_;
};

} // namespace broadwell
