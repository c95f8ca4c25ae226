#pragma once

// Brute-force referee for small grids: Newton's method on the discretised
// mild form, with a finite-difference Jacobian and a dense LU. The residual
// is written out directly from the collision formula and does not go through
// the line coefficients of the transport module, so agreement with the
// fixed-point solver is evidence about the iterations, not a tautology.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "broadwell/collision.hpp"
#include "broadwell/fixed_point.hpp"
#include "broadwell/grid.hpp"
#include "broadwell/mollifier.hpp"
#include "broadwell/params.hpp"
#include "broadwell/transport.hpp"

namespace broadwell {

struct OracleOptions {
  double tol = 1e-11;     ///< residual max-norm at which Newton stops
  int max_iterations = 60;
  int max_halvings = 40;
  double min_rcond = 1e-14;
  int max_cells = 16;
};

struct OracleResult {
  FieldQuartet field;
  int iterations = 0;
  double residual = 0.0; ///< max-norm of the final residual
  double rcond = 1.0;    ///< smallest reciprocal condition estimate seen
};

namespace oracle_detail {

inline Eigen::VectorXd pack(const FieldQuartet &f) {
  const Eigen::Index m = static_cast<Eigen::Index>(f[0].values().size());
  Eigen::VectorXd u(4 * m);
  for (int c = 0; c < 4; ++c) {
    auto v = f[c].values();
    for (Eigen::Index i = 0; i < m; ++i) u[c * m + i] = v[static_cast<std::size_t>(i)];
  }
  return u;
}

inline FieldQuartet unpack(const Eigen::VectorXd &u, const Grid &grid) {
  FieldQuartet f(grid);
  const Eigen::Index m = u.size() / 4;
  for (int c = 0; c < 4; ++c) {
    auto v = f[c].values();
    for (Eigen::Index i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] = u[c * m + i];
  }
  return f;
}

/// Defect of one cell's centre value `own` against the half-cell prediction
/// from the face value; advances `face` across the cell.
inline double cell_defect(double own, double &face, double gain, double rate, double h,
                          CellRule rule) {
  if (rule == CellRule::midpoint) {
    const double q = gain - rate * own;
    const double defect = own - (face + 0.5 * h * q);
    face += h * q;
    return defect;
  }
  // exact solution of v' = gain - rate v across the cell
  auto at = [&](double dist) {
    if (rate * dist < 1e-12) return face + gain * dist;
    const double decay = std::exp(-rate * dist);
    return face * decay + gain / rate * (1.0 - decay);
  };
  const double defect = own - at(0.5 * h);
  face = at(h);
  return defect;
}

/// Mild-form defect at every cell centre. Along each line the face value
/// starts at the truncated inflow and is advanced cell by cell; the centre
/// value must equal the half-cell prediction.
inline Eigen::VectorXd residual(const Eigen::VectorXd &u, const BoundaryTrace &fb,
                                const KineticSystem &sys, CellRule rule,
                                const FieldQuartet *frozen = nullptr) {
  const Grid grid = fb.grid();
  const int n = grid.n_cells();
  const double h = grid.spacing();
  const double k = sys.k;
  const FieldQuartet f = unpack(u, grid);
  const FieldQuartet m = Mollifier(grid, sys.moll_radius).apply(frozen ? *frozen : f);
  const Eigen::Index cells = static_cast<Eigen::Index>(n) * n;
  Eigen::VectorXd r(4 * cells);

  auto t = [k](double v) { return v * k / (k + v); };

  for (int c = 0; c < 4; ++c) {
    const bool horizontal = c < 2;
    const bool forward = c % 2 == 0;
    for (int line = 0; line < n; ++line) {
      double face = std::min(fb.value(static_cast<Direction>(c), line), 0.5 * k);
      for (int s = 0; s < n; ++s) {
        const int i = forward ? s : n - 1 - s;
        const int ix = horizontal ? i : line;
        const int iy = horizontal ? line : i;
        const double f1 = f[0](ix, iy), f2 = f[1](ix, iy), f3 = f[2](ix, iy), f4 = f[3](ix, iy);
        const double m1 = m[0](ix, iy), m2 = m[1](ix, iy), m3 = m[2](ix, iy), m4 = m[3](ix, iy);
        // gain and loss rate of component c; the loss is own * rate
        double gain = 0.0, rate = 0.0;
        switch (c) {
        case 0: gain = t(f3) * t(m4); rate = t(m2) / (1.0 + f1 / k); break;
        case 1: gain = t(m3) * t(f4); rate = t(m1) / (1.0 + f2 / k); break;
        case 2: gain = t(f1) * t(m2); rate = t(m4) / (1.0 + f3 / k); break;
        default: gain = t(m1) * t(f2); rate = t(m3) / (1.0 + f4 / k); break;
        }
        rate += sys.alpha;
        const Eigen::Index row = c * cells + static_cast<Eigen::Index>(iy) * n + ix;
        r[row] = cell_defect(f[c](ix, iy), face, gain, rate, h, rule);
      }
    }
  }
  return r;
}

/// Damped Newton on R(u) = 0: forward-difference Jacobian, dense LU with a
/// condition check, step halving until the residual max-norm decreases and
/// projection onto u >= 0.
template <class Residual>
Eigen::VectorXd newton(Eigen::VectorXd u, Residual &&residual, const OracleOptions &opt,
                       int &iterations, double &final_norm, double &min_rcond) {
  const Eigen::Index dim = u.size();
  Eigen::VectorXd r = residual(u);
  double norm = r.template lpNorm<Eigen::Infinity>();
  Eigen::MatrixXd jac(dim, dim);
  int it = 0;
  for (; it < opt.max_iterations && norm > opt.tol; ++it) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double step = 1e-7 * (1.0 + std::abs(u[j]));
      Eigen::VectorXd up = u;
      up[j] += step;
      jac.col(j) = (residual(up) - r) / step;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const double rc = lu.rcond();
    min_rcond = std::min(min_rcond, rc);
    if (!(rc >= opt.min_rcond))
      throw SolverError(ErrorKind::singular_jacobian,
                        "newton: reciprocal condition estimate " + std::to_string(rc) +
                            " at iteration " + std::to_string(it + 1));
    const Eigen::VectorXd delta = lu.solve(-r);

    double lambda = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= opt.max_halvings; ++halving, lambda *= 0.5) {
      Eigen::VectorXd trial = (u + lambda * delta).cwiseMax(0.0);
      Eigen::VectorXd rt = residual(trial);
      const double nt = rt.template lpNorm<Eigen::Infinity>();
      if (nt < norm) {
        u = std::move(trial);
        r = std::move(rt);
        norm = nt;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw SolverError(ErrorKind::iteration_cap,
                        "newton: line search failed at residual " + std::to_string(norm));
  }
  if (norm > opt.tol)
    throw SolverError(ErrorKind::iteration_cap, "newton: residual " + std::to_string(norm) +
                                                    " after " + std::to_string(it) +
                                                    " iterations");
  iterations = it;
  final_norm = norm;
  return u;
}

} // namespace oracle_detail

/// Newton oracle for the discrete system `sys` (truncated when alpha = 0 and
/// the mollifier radius is 0). With `frozen` the partner factors come from
/// the mollified frozen quartet instead of the unknown, which is the fixed
/// point of damped_map(frozen).
inline OracleResult newton_solve(const BoundaryTrace &fb, const KineticSystem &sys,
                                 const FieldQuartet &initial, CellRule rule = CellRule::midpoint,
                                 const OracleOptions &opt = {},
                                 const FieldQuartet *frozen = nullptr) {
  const Grid grid = fb.grid();
  if (grid.n_cells() > opt.max_cells)
    throw SolverError(ErrorKind::invalid_input,
                      "newton_solve: n_cells = " + std::to_string(grid.n_cells()) + " exceeds " +
                          std::to_string(opt.max_cells));
  if (!(initial.grid() == grid) || (frozen && !(frozen->grid() == grid)))
    throw SolverError(ErrorKind::invalid_input, "newton_solve: fields on a different grid");
  if (!(sys.k > 0.0)) throw SolverError(ErrorKind::invalid_input, "newton_solve: k must be > 0");
  require_nonnegative(initial, "newton_solve(initial)");

  OracleResult out{FieldQuartet(grid)};
  const Eigen::VectorXd u = oracle_detail::newton(
      oracle_detail::pack(initial),
      [&](const Eigen::VectorXd &v) { return oracle_detail::residual(v, fb, sys, rule, frozen); },
      opt, out.iterations, out.residual, out.rcond);
  out.field = oracle_detail::unpack(u, grid);
  return out;
}

struct PairOracleResult {
  std::array<ScalarField, 2> fields;
  int iterations = 0;
  double residual = 0.0;
  double rcond = 1.0;
};

/// Newton oracle for one pair with frozen gains (the subsystem bracketed by
/// alternating_bracket_pair): for the first member
///   v' = G1 - v (alpha + t(moll P2)) / (1 + v/k)
/// and symmetrically for the second.
inline PairOracleResult newton_solve_pair(const PairProblem &p, const std::array<ScalarField, 2> &initial,
                                          CellRule rule = CellRule::midpoint,
                                          const OracleOptions &opt = {}) {
  const Grid grid = p.gain_first.grid();
  const int n = grid.n_cells();
  const double h = grid.spacing();
  const double k = p.k;
  if (n > opt.max_cells)
    throw SolverError(ErrorKind::invalid_input, "newton_solve_pair: grid too large");
  const Eigen::Index cells = static_cast<Eigen::Index>(n) * n;
  const Mollifier moll(grid, p.moll_radius);

  auto residual = [&](const Eigen::VectorXd &u) {
    std::array<ScalarField, 2> f{ScalarField(grid), ScalarField(grid)};
    for (int c = 0; c < 2; ++c) {
      auto v = f[c].values();
      for (Eigen::Index i = 0; i < cells; ++i) v[static_cast<std::size_t>(i)] = u[c * cells + i];
    }
    const std::array<ScalarField, 2> m{moll.apply(f[0]), moll.apply(f[1])};
    Eigen::VectorXd r(2 * cells);
    for (int c = 0; c < 2; ++c) {
      const bool horizontal = p.pair == Pair::x_pair;
      const bool forward = c == 0;
      const ScalarField &gain = c == 0 ? p.gain_first : p.gain_second;
      const std::vector<double> &inflow = c == 0 ? p.inflow_first : p.inflow_second;
      for (int line = 0; line < n; ++line) {
        double face = std::min(inflow[static_cast<std::size_t>(line)], 0.5 * k);
        for (int s = 0; s < n; ++s) {
          const int i = forward ? s : n - 1 - s;
          const int ix = horizontal ? i : line;
          const int iy = horizontal ? line : i;
          const double own = f[c](ix, iy);
          const double partner = m[1 - c](ix, iy);
          const double rate = p.alpha + partner * k / (k + partner) / (1.0 + own / k);
          r[c * cells + static_cast<Eigen::Index>(iy) * n + ix] =
              oracle_detail::cell_defect(own, face, gain(ix, iy), rate, h, rule);
        }
      }
    }
    return r;
  };

  Eigen::VectorXd u0(2 * cells);
  for (int c = 0; c < 2; ++c) {
    auto v = initial[c].values();
    for (Eigen::Index i = 0; i < cells; ++i) u0[c * cells + i] = v[static_cast<std::size_t>(i)];
  }
  PairOracleResult out{{ScalarField(grid), ScalarField(grid)}};
  const Eigen::VectorXd u =
      oracle_detail::newton(std::move(u0), residual, opt, out.iterations, out.residual, out.rcond);
  for (int c = 0; c < 2; ++c) {
    auto v = out.fields[c].values();
    for (Eigen::Index i = 0; i < cells; ++i) v[static_cast<std::size_t>(i)] = u[c * cells + i];
  }
  return out;
}

/// Max-norm of the oracle's residual at `f`; used to check that a converged
/// fixed-point solution also solves the oracle's equations.
inline double oracle_residual(const FieldQuartet &f, const BoundaryTrace &fb,
                              const KineticSystem &sys, CellRule rule = CellRule::midpoint) {
  return oracle_detail::residual(oracle_detail::pack(f), fb, sys, rule).lpNorm<Eigen::Infinity>();
}

/// L1 distance between the Newton oracle (started from free streaming) and
/// solve_truncated on the same data.
inline double cross_validate(const BoundaryTrace &fb, double k, const SolverParams &params) {
  const auto fp = solve_truncated(fb, k, params);
  const auto nw = newton_solve(fb, KineticSystem::truncated(k), free_streaming(fb, k),
                               params.cell_rule);
  return l1_distance(fp.field, nw.field);
}

} // namespace broadwell
