#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "broadwell/collision.hpp"
#include "broadwell/grid.hpp"
#include "broadwell/mollifier.hpp"
#include "broadwell/params.hpp"

namespace broadwell {

/// Centre value and outgoing face value of one cell traversed in the
/// direction of travel.
struct CellStep {
  double center;
  double outflow;
};

namespace detail {

/// Exact solution of F' = g - aF after distance s from inflow value `in`.
inline double exponential_profile(double in, double a, double g, double s) noexcept {
  if (a * s < 1e-12) return in + g * s;
  return in * std::exp(-a * s) - g * std::expm1(-a * s) / a;
}

/// Mean of the exact exponential profile over [0, s].
inline double exponential_mean(double in, double a, double g, double s) noexcept {
  if (a * s < 1e-12) return in + 0.5 * g * s;
  const double eq = g / a;
  return eq + (in - eq) * (-std::expm1(-a * s)) / (a * s);
}

} // namespace detail

/// Integrates one cell of width `width` with constant absorption `a` and
/// gain `g` starting from the face value `inflow`.
inline CellStep cell_step(CellRule rule, double inflow, double a, double g, double width) {
  if (rule == CellRule::exponential)
    return {detail::exponential_profile(inflow, a, g, 0.5 * width),
            detail::exponential_profile(inflow, a, g, width)};

  const double center = (inflow + 0.5 * width * g) / (1.0 + 0.5 * width * a);
  double outflow = inflow + width * (g - a * center);
  if (outflow < 0.0) {
    // Only reachable when a*width > 2.
    if (outflow < -1e-13 * (1.0 + inflow + width * g))
      throw SolverError(ErrorKind::positivity_loss,
                        "midpoint cell with absorption*spacing = " + std::to_string(a * width) +
                            " > 2; refine the grid");
    outflow = 0.0;
  }
  return {center, outflow};
}

/// One characteristic line with frozen per-cell coefficients. `gain` and
/// `absorption` are indexed by increasing coordinate regardless of direction.
struct LineProblem {
  Direction direction = Direction::x_forward;
  double inflow = 0.0;
  std::span<const double> gain;
  std::span<const double> absorption;
  double damping = 0.0;
  double spacing = 0.0;
  CellRule rule = CellRule::exponential;
};

struct LineSolution {
  std::vector<double> values; ///< cell-centre values, increasing coordinate
  double outflow = 0.0;       ///< value on the outgoing face
};

inline LineSolution solve_line(const LineProblem &p) {
  const int n = static_cast<int>(p.gain.size());
  if (static_cast<int>(p.absorption.size()) != n)
    throw SolverError(ErrorKind::invalid_input, "solve_line: gain/absorption length mismatch");
  if (!(p.spacing > 0.0) || !(p.inflow >= 0.0) || !(p.damping >= 0.0))
    throw SolverError(ErrorKind::invalid_input, "solve_line: invalid inflow/damping/spacing");

  LineSolution out;
  out.values.resize(static_cast<std::size_t>(n));
  double face = p.inflow;
  for (int s = 0; s < n; ++s) {
    const int i = is_forward(p.direction) ? s : n - 1 - s;
    const double g = p.gain[i];
    const double a = p.absorption[i] + p.damping;
    if (!(g >= 0.0) || !(p.absorption[i] >= 0.0))
      throw SolverError(ErrorKind::invalid_input, "solve_line: negative gain or absorption");
    const CellStep step = cell_step(p.rule, face, a, g, p.spacing);
    out.values[i] = step.center;
    face = step.outflow;
  }
  out.outflow = face;
  return out;
}

/// Per-cell coefficients of one component's linear transport problem.
struct LineCoefficients {
  ScalarField gain;
  ScalarField absorption;
};

/// Coefficients of the component travelling in `d` when its own loss factor
/// is kept linear in the unknown:
///
///   F1: gain t(C3) t(M4), absorption alpha + t(M2) / (1 + C1/k)
///   F2: gain t(M3) t(C4), absorption alpha + t(M1) / (1 + C2/k)
///   F3: gain t(C1) t(M2), absorption alpha + t(M4) / (1 + C3/k)
///   F4: gain t(M1) t(C2), absorption alpha + t(M3) / (1 + C4/k)
///
/// `current` (C) supplies the unmollified factors and the frozen own
/// denominator, `mollified` (M) the partner factors that the damped system
/// convolves. With C = M = F and alpha = 0 gain minus absorption*F is the
/// truncated collision.
inline LineCoefficients coefficients(Direction d, const FieldQuartet &current,
                                     const FieldQuartet &mollified, double k, double alpha) {
  LineCoefficients lc{ScalarField(current.grid()), ScalarField(current.grid())};
  auto gain = lc.gain.values();
  auto abs = lc.absorption.values();
  auto c = [&](int i) { return current[i].values(); };
  auto m = [&](int i) { return mollified[i].values(); };
  const int own = index_of(d);
  // (gain from current, gain from mollified, loss partner)
  int gc = 0, gm = 0, partner = 0;
  switch (d) {
  case Direction::x_forward: gc = 2; gm = 3; partner = 1; break;
  case Direction::x_backward: gc = 3; gm = 2; partner = 0; break;
  case Direction::y_forward: gc = 0; gm = 1; partner = 3; break;
  case Direction::y_backward: gc = 1; gm = 0; partner = 2; break;
  }
  auto cg = c(gc), mg = m(gm), mp = m(partner), co = c(own);
  for (std::size_t i = 0; i < gain.size(); ++i) {
    gain[i] = saturate(cg[i], k) * saturate(mg[i], k);
    abs[i] = alpha + saturate(mp[i], k) / (1.0 + co[i] / k);
  }
  return lc;
}

/// Values of one component on every line plus its outflow trace, indexed by
/// line.
struct ComponentSolution {
  ScalarField field;
  std::vector<double> outflow;
};

/// Solves every line of direction `d` with given per-cell coefficients.
/// `inflow` is the (already truncated) boundary profile on the inflow face.
inline ComponentSolution solve_lines(Direction d, const ScalarField &gain,
                                     const ScalarField &absorption,
                                     std::span<const double> inflow, CellRule rule) {
  const int n = gain.n();
  ComponentSolution out{ScalarField(gain.grid()), std::vector<double>(static_cast<std::size_t>(n))};
  for (int line = 0; line < n; ++line) {
    const auto g = gain.line(d, line);
    const auto a = absorption.line(d, line);
    LineProblem p;
    p.direction = d;
    p.inflow = inflow[line];
    p.gain = g;
    p.absorption = a;
    p.spacing = gain.grid().spacing();
    p.rule = rule;
    auto sol = solve_line(p);
    out.field.set_line(d, line, sol.values);
    out.outflow[line] = sol.outflow;
  }
  return out;
}

/// Solves component `d` against frozen fields, with boundary data capped at
/// k/2.
inline ComponentSolution solve_component(const FieldQuartet &current,
                                         const FieldQuartet &mollified, Direction d,
                                         const BoundaryTrace &fb, double k, double damping,
                                         CellRule rule) {
  const auto lc = coefficients(d, current, mollified, k, damping);
  std::vector<double> inflow = fb.profile(d);
  for (double &v : inflow) v = std::min(v, 0.5 * k);
  return solve_lines(d, lc.gain, lc.absorption, inflow, rule);
}

/// The stationary system being discretised: truncation k, damping alpha and
/// mollifier radius applied to the partner factors. alpha = radius = 0 is the
/// truncated system.
struct KineticSystem {
  double k = 8.0;
  double alpha = 0.0;
  double moll_radius = 0.0;

  static KineticSystem truncated(double k) { return {k, 0.0, 0.0}; }
};

namespace detail {

/// Walks every line of `d` with the field's own coefficients and calls
/// visit(line, cell_index, inflow_face, a, g) in order of travel; returns the
/// outflow trace.
template <class Visit>
std::vector<double> march(const FieldQuartet &f, const FieldQuartet &m, Direction d,
                          const BoundaryTrace &fb, const KineticSystem &sys, CellRule rule,
                          Visit &&visit) {
  const int n = f.n();
  const double h = f.grid().spacing();
  const auto lc = coefficients(d, f, m, sys.k, sys.alpha);
  const ScalarField &own = f[d];
  std::vector<double> trace(static_cast<std::size_t>(n));
  for (int line = 0; line < n; ++line) {
    double face = std::min(fb.value(d, line), 0.5 * sys.k);
    for (int s = 0; s < n; ++s) {
      const int i = is_forward(d) ? s : n - 1 - s;
      const int ix = along_x(d) ? i : line;
      const int iy = along_x(d) ? line : i;
      const double a = lc.absorption(ix, iy);
      const double g = lc.gain(ix, iy);
      visit(ix, iy, face, a, g);
      if (rule == CellRule::midpoint)
        face += h * (g - a * own(ix, iy));
      else
        face = exponential_profile(face, a, g, h);
    }
    trace[line] = face;
  }
  return trace;
}

} // namespace detail

/// L1 defect of each component against its mild form. For the midpoint rule
/// this is F_i(x) - [fb_i + int_0^x Q_i] with the collision integral by
/// midpoint quadrature; for the exponential rule the within-cell profile is
/// the exact exponential one.
inline std::array<double, 4> mild_residual(const FieldQuartet &f, const BoundaryTrace &fb,
                                           const KineticSystem &sys,
                                           CellRule rule = CellRule::midpoint) {
  const FieldQuartet m = Mollifier(f.grid(), sys.moll_radius).apply(f);
  const double h = f.grid().spacing();
  std::array<double, 4> res{};
  for (Direction d : all_directions) {
    const ScalarField &own = f[d];
    double sum = 0.0;
    detail::march(f, m, d, fb, sys, rule, [&](int ix, int iy, double face, double a, double g) {
      const double v = own(ix, iy);
      const double predicted = rule == CellRule::midpoint
                                   ? face + 0.5 * h * (g - a * v)
                                   : detail::exponential_profile(face, a, g, 0.5 * h);
      sum += std::abs(v - predicted);
    });
    res[index_of(d)] = sum * h * h;
  }
  return res;
}

/// Outgoing face values of each component reconstructed from its own cell
/// values with the line integrator: F1(1,y), F2(0,y), F3(x,1), F4(x,0).
inline std::array<std::vector<double>, 4> outflow_traces(const FieldQuartet &f,
                                                         const BoundaryTrace &fb,
                                                         const KineticSystem &sys,
                                                         CellRule rule = CellRule::midpoint) {
  const FieldQuartet m = Mollifier(f.grid(), sys.moll_radius).apply(f);
  std::array<std::vector<double>, 4> out;
  for (Direction d : all_directions)
    out[index_of(d)] = detail::march(f, m, d, fb, sys, rule, [](int, int, double, double, double) {});
  return out;
}

} // namespace broadwell
