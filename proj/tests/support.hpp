#pragma once

#include <random>

#include "broadwell/broadwell.hpp"

namespace bw_test {

using namespace broadwell;

/// fb = (0.4, 0.1, 0.3, 0.2): the small reference problem used across suites.
inline BoundaryTrace reference_boundary(int n) {
  return BoundaryTrace::constant(Grid(n), {0.4, 0.1, 0.3, 0.2});
}

/// Tolerances tight enough that converged solves meet the 10*tol_outer gates.
inline SolverParams tight_params() {
  SolverParams p;
  p.tol_outer = 1e-11;
  p.tol_bracket = 1e-13;
  return p;
}

inline BoundaryTrace random_boundary(int n, std::uint64_t seed, double level = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, level);
  std::array<std::vector<double>, 4> p;
  for (auto &v : p) {
    v.resize(static_cast<std::size_t>(n));
    for (double &x : v) x = u(rng);
  }
  return BoundaryTrace(Grid(n), std::move(p));
}

inline FieldQuartet random_quartet(int n, std::mt19937_64 &rng, double level) {
  std::uniform_real_distribution<double> u(0.0, level);
  FieldQuartet f{Grid(n)};
  for (int c = 0; c < 4; ++c)
    for (double &x : f[c].values()) x = u(rng);
  return f;
}

} // namespace bw_test
