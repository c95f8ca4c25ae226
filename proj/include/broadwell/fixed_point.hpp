#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "broadwell/collision.hpp"
#include "broadwell/grid.hpp"
#include "broadwell/mollifier.hpp"
#include "broadwell/params.hpp"
#include "broadwell/transport.hpp"

namespace broadwell {

struct StageReport {
  std::string name;
  int iterations = 0;
  double increment = 0.0;
  bool converged = false;
  double seconds = 0.0; ///< wall time; kept out of serialised artifacts
};

struct SolveReport {
  double k = 0.0;
  double alpha = 0.0;
  std::string path;
  std::vector<StageReport> stages;
  std::array<double, 4> mild_residual{};
  double final_increment = 0.0;
  int bracket_sweeps = 0;
  double max_bracket_width = 0.0;
  bool converged = false;
};

namespace detail {

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline bool below(double a, double b) noexcept { return a <= b + 1e-12 * (1.0 + std::abs(b)); }

/// True when a <= b pointwise up to a 1e-12 relative slack.
inline bool dominated(const ScalarField &a, const ScalarField &b) noexcept {
  auto va = a.values(), vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i)
    if (!below(va[i], vb[i])) return false;
  return true;
}

} // namespace detail

/// Field with each component equal to its truncated inflow value along its
/// whole line (collisionless transport).
inline FieldQuartet free_streaming(const BoundaryTrace &fb, double k) {
  FieldQuartet f(fb.grid());
  const int n = fb.grid().n_cells();
  for (Direction d : all_directions)
    for (int line = 0; line < n; ++line) {
      const double v = std::min(fb.value(d, line), 0.5 * k);
      for (int s = 0; s < n; ++s) {
        if (along_x(d))
          f[d](s, line) = v;
        else
          f[d](line, s) = v;
      }
    }
  return f;
}

// ---------------------------------------------------------------------------
// Damped, mollified system: inner monotone iteration and Picard outer loop.
// ---------------------------------------------------------------------------

struct DampedMapResult {
  FieldQuartet field;
  int sweeps = 0;
  double increment = 0.0;
  bool converged = false;
};

/// T(frozen): solves the damped system whose partner factors are the
/// mollified frozen fields. Runs F^{n+1} = S(F^n, frozen) from F^0 = 0; each
/// sweep is checked to dominate its predecessor.
inline DampedMapResult damped_map(const FieldQuartet &frozen, const BoundaryTrace &fb,
                                  const SolverParams &params) {
  params.validate();
  if (!(params.alpha > 0.0))
    throw SolverError(ErrorKind::invalid_input, "damped_map requires alpha > 0");
  require_nonnegative(frozen, "damped_map(frozen)");

  const FieldQuartet m = Mollifier(frozen.grid(), params.moll_radius).apply(frozen);
  DampedMapResult r{FieldQuartet(frozen.grid())};
  for (int sweep = 1; sweep <= params.max_inner; ++sweep) {
    FieldQuartet next(frozen.grid());
    for (Direction d : all_directions)
      next[d] = solve_component(r.field, m, d, fb, params.k, params.alpha, params.cell_rule).field;
    for (int c = 0; c < 4; ++c)
      if (!detail::dominated(r.field[c], next[c]))
        throw SolverError(ErrorKind::non_monotone, "damped_map: inner sweep " +
                                                       std::to_string(sweep) + " decreased F" +
                                                       std::to_string(c + 1));
    r.increment = l1_distance(next, r.field);
    r.field = std::move(next);
    r.sweeps = sweep;
    if (r.increment <= params.tol_inner) {
      r.converged = true;
      break;
    }
  }
  require_nonnegative(r.field, "damped_map");
  return r;
}

// ---------------------------------------------------------------------------
// Alternating (sandwich) scheme for one pair of opposite velocities.
// ---------------------------------------------------------------------------

enum class Pair { x_pair, y_pair };

/// One pair of opposite velocities with frozen gains: F1/F2 along x, or
/// F3/F4 along y. The first member is the forward direction.
struct PairProblem {
  Pair pair = Pair::x_pair;
  ScalarField gain_first;
  ScalarField gain_second;
  std::vector<double> inflow_first;  ///< raw boundary samples, capped at k/2 here
  std::vector<double> inflow_second;
  double k = 8.0;
  double alpha = 0.0;       ///< damping; 0 for the truncated system
  double moll_radius = 0.0; ///< mollifier applied to the partner factor
};

struct BracketState {
  std::array<ScalarField, 2> lower;
  std::array<ScalarField, 2> upper;
  std::vector<double> width_history;
  int sweeps = 0;
};

struct BracketResult {
  std::array<ScalarField, 2> fields; ///< midpoint of the final bracket
  BracketState state;
  bool converged = false;
};

/// Interleaved scheme for the pair. Iterate l+1 of the first member solves
///
///   dF = G - F t(P2^l) / (1 + P1^{l-1}/k)
///
/// (and symmetrically for the second member) from P^{-1} = P^0 = 0, so odd
/// iterates decrease from above and even iterates increase from below.
/// Every ordering is checked; a violation throws BracketViolation.
inline BracketResult alternating_bracket_pair(const PairProblem &p, const SolverParams &params) {
  const Grid grid = p.gain_first.grid();
  const int n = grid.n_cells();
  const Direction first = p.pair == Pair::x_pair ? Direction::x_forward : Direction::y_forward;
  const Direction second = p.pair == Pair::x_pair ? Direction::x_backward : Direction::y_backward;
  for (double v : p.gain_first.values())
    if (!(v >= 0.0)) throw SolverError(ErrorKind::invalid_input, "bracket: negative gain");
  for (double v : p.gain_second.values())
    if (!(v >= 0.0)) throw SolverError(ErrorKind::invalid_input, "bracket: negative gain");
  if (static_cast<int>(p.inflow_first.size()) != n || static_cast<int>(p.inflow_second.size()) != n)
    throw SolverError(ErrorKind::invalid_input, "bracket: inflow length mismatch");

  std::vector<double> in1 = p.inflow_first, in2 = p.inflow_second;
  for (double &v : in1) v = std::min(v, 0.5 * p.k);
  for (double &v : in2) v = std::min(v, 0.5 * p.k);
  const Mollifier moll(grid, p.moll_radius);

  // iterates l-1 and l for both members
  std::array<ScalarField, 2> older{ScalarField(grid), ScalarField(grid)};
  std::array<ScalarField, 2> latest{ScalarField(grid), ScalarField(grid)};
  std::array<ScalarField, 2> odd{ScalarField(grid), ScalarField(grid)};
  std::array<ScalarField, 2> even{ScalarField(grid), ScalarField(grid)};

  BracketResult r{{ScalarField(grid), ScalarField(grid)},
                  BracketState{{ScalarField(grid), ScalarField(grid)},
                               {ScalarField(grid), ScalarField(grid)},
                               {},
                               0}};

  auto violation = [&](int l, const char *what, int member) {
    throw SolverError(ErrorKind::bracket_violation,
                      "iterate " + std::to_string(l) + ": " + what + " for member " +
                          std::to_string(member + 1));
  };

  for (int l = 0; l < 2 * params.max_bracket; ++l) {
    const int next_index = l + 1;
    std::array<ScalarField, 2> next{ScalarField(grid), ScalarField(grid)};
    const std::array<ScalarField, 2> partner{moll.apply(latest[0]), moll.apply(latest[1])};
    for (int member = 0; member < 2; ++member) {
      const ScalarField &other = partner[1 - member];
      const ScalarField &own_old = older[member];
      ScalarField absorption(grid);
      auto av = absorption.values();
      auto ov = other.values(), dv = own_old.values();
      for (std::size_t i = 0; i < av.size(); ++i)
        av[i] = p.alpha + saturate(ov[i], p.k) / (1.0 + dv[i] / p.k);
      next[member] = solve_lines(member == 0 ? first : second,
                                 member == 0 ? p.gain_first : p.gain_second, absorption,
                                 member == 0 ? in1 : in2, params.cell_rule)
                         .field;
    }

    const bool is_odd = next_index % 2 == 1;
    for (int member = 0; member < 2; ++member) {
      if (is_odd) {
        if (next_index >= 3 && !detail::dominated(next[member], odd[member]))
          violation(next_index, "odd iterate increased", member);
        if (next_index >= 3 && !detail::dominated(even[member], next[member]))
          violation(next_index, "odd iterate fell below even iterate", member);
      } else {
        if (!detail::dominated(even[member], next[member]))
          violation(next_index, "even iterate decreased", member);
        if (!detail::dominated(next[member], odd[member]))
          violation(next_index, "even iterate rose above odd iterate", member);
      }
    }

    for (int member = 0; member < 2; ++member) {
      (is_odd ? odd : even)[member] = next[member];
      older[member] = std::move(latest[member]);
      latest[member] = std::move(next[member]);
    }

    if (!is_odd) {
      const double width = l1_distance(odd[0], even[0]) + l1_distance(odd[1], even[1]);
      r.state.width_history.push_back(width);
      r.state.sweeps += 1;
      if (width <= params.tol_bracket) {
        r.converged = true;
        break;
      }
    }
  }

  r.state.lower = even;
  r.state.upper = odd;
  for (int member = 0; member < 2; ++member) {
    auto lo = even[member].values(), hi = odd[member].values();
    auto out = r.fields[member].values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (lo[i] + hi[i]);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Outer alternation between the two pairs.
// ---------------------------------------------------------------------------

struct AlternationResult {
  FieldQuartet field;
  int outer_iterations = 0;
  double increment = 0.0;
  int bracket_sweeps = 0;
  double max_bracket_width = 0.0;
  bool brackets_converged = true;
  bool converged = false;
};

/// Gauss-Seidel over the pairs: freeze F3, F4 and bracket (F1, F2), then
/// freeze the new F1, F2 and bracket (F3, F4). Stops when a full sweep moves
/// the quartet by at most tol_outer in L1.
inline AlternationResult solve_by_pair_alternation(const BoundaryTrace &fb,
                                                   const KineticSystem &sys,
                                                   const SolverParams &params,
                                                   FieldQuartet initial) {
  const Grid grid = fb.grid();
  const Mollifier moll(grid, sys.moll_radius);
  AlternationResult r{std::move(initial)};
  require_nonnegative(r.field, "pair alternation (initial)");

  auto run_pair = [&](Pair pair) {
    const FieldQuartet m = moll.apply(r.field);
    const Direction a = pair == Pair::x_pair ? Direction::x_forward : Direction::y_forward;
    const Direction b = pair == Pair::x_pair ? Direction::x_backward : Direction::y_backward;
    PairProblem pp{pair,
                   coefficients(a, r.field, m, sys.k, sys.alpha).gain,
                   coefficients(b, r.field, m, sys.k, sys.alpha).gain,
                   fb.profile(a),
                   fb.profile(b),
                   sys.k,
                   sys.alpha,
                   sys.moll_radius};
    auto br = alternating_bracket_pair(pp, params);
    r.bracket_sweeps += br.state.sweeps;
    const double w = br.state.width_history.empty() ? 0.0 : br.state.width_history.back();
    r.max_bracket_width = std::max(r.max_bracket_width, w);
    r.brackets_converged = r.brackets_converged && br.converged;
    r.field[a] = std::move(br.fields[0]);
    r.field[b] = std::move(br.fields[1]);
  };

  for (int it = 1; it <= params.max_outer; ++it) {
    const FieldQuartet previous = r.field;
    r.max_bracket_width = 0.0;
    r.brackets_converged = true;
    run_pair(Pair::x_pair);
    run_pair(Pair::y_pair);
    r.increment = l1_distance(r.field, previous);
    r.outer_iterations = it;
    if (r.increment <= params.tol_outer) {
      r.converged = r.brackets_converged;
      break;
    }
  }
  require_nonnegative(r.field, "pair alternation");
  return r;
}

struct FixedPointSolution {
  FieldQuartet field;
  SolveReport report{};
};

/// Picard iteration f <- T(f) from f = 0 for the damped, mollified system.
/// When the outer loop hits max_outer the damped system is solved instead by
/// pair alternation with bracketing, starting from the last Picard iterate;
/// report.path records which route produced the result.
inline FixedPointSolution picard_fixed_point(const BoundaryTrace &fb, const SolverParams &params) {
  params.validate();
  if (!(params.alpha > 0.0))
    throw SolverError(ErrorKind::invalid_input, "picard_fixed_point requires alpha > 0");
  const KineticSystem sys{params.k, params.alpha, params.moll_radius};

  FixedPointSolution out{FieldQuartet(fb.grid())};
  SolveReport &rep = out.report;
  rep.k = params.k;
  rep.alpha = params.alpha;

  detail::Stopwatch clock;
  StageReport picard{"picard"};
  bool inner_ok = true;
  for (int it = 1; it <= params.max_outer; ++it) {
    auto t = damped_map(out.field, fb, params);
    inner_ok = inner_ok && t.converged;
    picard.increment = l1_distance(t.field, out.field);
    picard.iterations = it;
    out.field = std::move(t.field);
    if (picard.increment <= params.tol_outer) {
      picard.converged = inner_ok;
      break;
    }
  }
  picard.seconds = clock.seconds();
  rep.stages.push_back(picard);
  rep.path = "picard";
  rep.final_increment = picard.increment;
  rep.converged = picard.converged;

  if (!picard.converged) {
    detail::Stopwatch fallback_clock;
    auto alt = solve_by_pair_alternation(fb, sys, params, out.field);
    StageReport st{"bracket-fallback", alt.outer_iterations, alt.increment, alt.converged,
                   fallback_clock.seconds()};
    rep.stages.push_back(st);
    rep.path = "bracket-fallback";
    rep.bracket_sweeps = alt.bracket_sweeps;
    rep.max_bracket_width = alt.max_bracket_width;
    rep.final_increment = alt.increment;
    rep.converged = alt.converged;
    out.field = std::move(alt.field);
  }
  rep.mild_residual = mild_residual(out.field, fb, sys, params.cell_rule);
  require_nonnegative(out.field, "picard_fixed_point");
  return out;
}

/// Solution of the truncated system (no damping, no mollifier) by pair
/// alternation. Starts from `warm` when given, otherwise from free streaming.
inline FixedPointSolution solve_truncated(const BoundaryTrace &fb, double k,
                                          const SolverParams &params,
                                          const FieldQuartet *warm = nullptr) {
  SolverParams p = params;
  p.k = k;
  p.validate();
  const KineticSystem sys = KineticSystem::truncated(k);

  detail::Stopwatch clock;
  FieldQuartet initial = warm ? *warm : free_streaming(fb, k);
  if (!(initial.grid() == fb.grid()))
    throw SolverError(ErrorKind::invalid_input, "solve_truncated: warm start on a different grid");
  auto alt = solve_by_pair_alternation(fb, sys, p, std::move(initial));

  FixedPointSolution out{std::move(alt.field)};
  SolveReport &rep = out.report;
  rep.k = k;
  rep.alpha = 0.0;
  rep.path = "pair-alternation";
  rep.stages.push_back(
      {"truncated", alt.outer_iterations, alt.increment, alt.converged, clock.seconds()});
  rep.final_increment = alt.increment;
  rep.bracket_sweeps = alt.bracket_sweeps;
  rep.max_bracket_width = alt.max_bracket_width;
  rep.converged = alt.converged;
  rep.mild_residual = mild_residual(out.field, fb, sys, p.cell_rule);
  return out;
}

} // namespace broadwell
