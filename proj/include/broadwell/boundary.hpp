#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "broadwell/config.hpp"
#include "broadwell/grid.hpp"

namespace broadwell {

namespace boundary_detail {

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw. Unlike
/// std::uniform_real_distribution this is the same on every standard library.
inline double unit_uniform(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::array<std::vector<double>, 4> read_profile_csv(const std::string &path, int n) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open boundary file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("boundary file '" + path + "' is empty");
  std::array<std::vector<double>, 4> p;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> cols;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        cols.push_back(std::stod(cell, &used));
      } catch (const std::exception &) {
        throw ConfigError("boundary file '" + path + "': bad number '" + cell + "'", row, 1);
      }
    }
    if (cols.size() != 5)
      throw ConfigError("boundary file '" + path + "': expected 5 columns", row, 1);
    for (int c = 0; c < 4; ++c) {
      const double v = cols[c + 1];
      if (!std::isfinite(v) || v < 0.0)
        throw ConfigError("boundary file '" + path + "': negative or non-finite sample", row,
                          1);
      p[c].push_back(v);
    }
  }
  if (static_cast<int>(p[0].size()) != n)
    throw ConfigError("boundary file '" + path + "' has " + std::to_string(p[0].size()) +
                      " rows, grid needs " + std::to_string(n));
  return p;
}

} // namespace boundary_detail

/// Samples the boundary profiles at the cell centres of `grid`.
inline BoundaryTrace make_boundary(const BoundarySpec &spec, const Grid &grid,
                                   std::uint64_t seed) {
  const int n = grid.n_cells();
  std::array<std::vector<double>, 4> p;
  for (auto &v : p) v.resize(static_cast<std::size_t>(n));

  switch (spec.kind) {
  case BoundaryKind::constant:
    for (int c = 0; c < 4; ++c)
      for (int i = 0; i < n; ++i) p[c][i] = spec.values[c];
    break;
  case BoundaryKind::step:
    for (int c = 0; c < 4; ++c)
      for (int i = 0; i < n; ++i) p[c][i] = grid.center(i) < spec.at ? spec.low[c] : spec.high[c];
    break;
  case BoundaryKind::power:
    for (int c = 0; c < 4; ++c)
      for (int i = 0; i < n; ++i) p[c][i] = spec.scale[c] * std::pow(grid.center(i), spec.exponent);
    break;
  case BoundaryKind::random: {
    std::mt19937_64 rng(seed);
    for (int c = 0; c < 4; ++c) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += p[c][i] = boundary_detail::unit_uniform(rng);
      const double scale = sum > 0.0 ? spec.mass[c] / (sum * grid.spacing()) : 0.0;
      for (double &v : p[c]) v *= scale;
    }
    break;
  }
  case BoundaryKind::file: p = boundary_detail::read_profile_csv(spec.path, n); break;
  }

  for (int c = 0; c < 4; ++c)
    for (double v : p[c])
      if (!std::isfinite(v) || v < 0.0)
        throw ConfigError("boundary profile fb" + std::to_string(c + 1) +
                          " has a negative or non-finite sample");
  return BoundaryTrace(grid, std::move(p));
}

} // namespace broadwell
