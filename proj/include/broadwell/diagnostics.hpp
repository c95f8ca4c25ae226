#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "broadwell/collision.hpp"
#include "broadwell/grid.hpp"
#include "broadwell/params.hpp"
#include "broadwell/transport.hpp"

namespace broadwell {

enum class Axis { x, y };

inline const char *to_string(Axis a) noexcept { return a == Axis::x ? "x" : "y"; }

// ---------------------------------------------------------------------------
// Conservation
// ---------------------------------------------------------------------------

struct FluxBalance {
  double inflow = 0.0;
  double outflow = 0.0;
  double deviation = 0.0;
};

/// Total inflow of the truncated boundary data against total outflow through
/// the outgoing faces, traces reconstructed by the line integrator.
inline FluxBalance flux_balance(const FieldQuartet &f, const BoundaryTrace &fb, double k,
                                CellRule rule = CellRule::midpoint) {
  const double h = f.grid().spacing();
  const auto traces = outflow_traces(f, fb, KineticSystem::truncated(k), rule);
  FluxBalance fl;
  for (int c = 0; c < 4; ++c) {
    for (double v : fb.profile(c)) fl.inflow += std::min(v, 0.5 * k);
    for (double v : traces[c]) fl.outflow += v;
  }
  fl.inflow *= h;
  fl.outflow *= h;
  fl.deviation = std::abs(fl.inflow - fl.outflow);
  return fl;
}

/// Largest spread of F1 + F2 along any row and of F3 + F4 along any column.
/// Zero for an exact solution, since the pair sum is constant along lines.
inline double line_conservation(const FieldQuartet &f) {
  const int n = f.n();
  double dev = 0.0;
  for (int line = 0; line < n; ++line) {
    double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
    double lo_y = lo_x, hi_y = -lo_x;
    for (int s = 0; s < n; ++s) {
      const double sx = f[0](s, line) + f[1](s, line);
      const double sy = f[2](line, s) + f[3](line, s);
      lo_x = std::min(lo_x, sx);
      hi_x = std::max(hi_x, sx);
      lo_y = std::min(lo_y, sy);
      hi_y = std::max(hi_y, sy);
    }
    dev = std::max({dev, hi_x - lo_x, hi_y - lo_y});
  }
  return dev;
}

// ---------------------------------------------------------------------------
// Entropy
// ---------------------------------------------------------------------------

struct EntropyProduction {
  double value = 0.0;
  int singular_cells = 0; ///< cells where exactly one of gain/loss vanished
};

namespace detail {

/// (a - b) ln(a/b) >= 0 with 0 at a = b. A single zero argument is an
/// infinite term; it is counted and left out of the quadrature.
inline double dissipation_term(double a, double b, int &singular) noexcept {
  if (a == b) return 0.0;
  if (a <= 0.0 || b <= 0.0) {
    ++singular;
    return 0.0;
  }
  return (a - b) * std::log(a / b);
}

} // namespace detail

/// Entropy production D^k of the truncated collision.
inline EntropyProduction entropy_production(const FieldQuartet &f, double k) {
  EntropyProduction ep;
  auto f1 = f[0].values(), f2 = f[1].values(), f3 = f[2].values(), f4 = f[3].values();
  double s = 0.0;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    const double a = saturate(f1[i], k) * saturate(f2[i], k);
    const double b = saturate(f3[i], k) * saturate(f4[i], k);
    s += detail::dissipation_term(a, b, ep.singular_cells);
  }
  const double h = f.grid().spacing();
  ep.value = s * h * h;
  return ep;
}

/// Untruncated dissipation functional int (F1F2 - F3F4) ln(F1F2 / F3F4).
inline EntropyProduction entropy_dissipation_untruncated(const FieldQuartet &f) {
  EntropyProduction ep;
  auto f1 = f[0].values(), f2 = f[1].values(), f3 = f[2].values(), f4 = f[3].values();
  double s = 0.0;
  for (std::size_t i = 0; i < f1.size(); ++i)
    s += detail::dissipation_term(f1[i] * f2[i], f3[i] * f4[i], ep.singular_cells);
  const double h = f.grid().spacing();
  ep.value = s * h * h;
  return ep;
}

/// sum_i int F_i 1{F_i > threshold}.
inline double tail_mass(const FieldQuartet &f, double threshold) {
  double s = 0.0;
  for (int c = 0; c < 4; ++c)
    for (double v : f[c].values())
      if (v > threshold) s += v;
  const double h = f.grid().spacing();
  return s * h * h;
}

// ---------------------------------------------------------------------------
// Translation moduli
// ---------------------------------------------------------------------------

/// int |f(. + h e_axis) - f| over the overlap of the square with its shift,
/// h = shift_cells * spacing. With `renormalize` the field is ln(1 + f).
inline double translation_modulus(const ScalarField &f, Axis axis, int shift_cells,
                                  bool renormalize) {
  const int n = f.n();
  const int s = std::abs(shift_cells);
  if (s >= n) return 0.0;
  auto value = [&](int ix, int iy) {
    const double v = f(ix, iy);
    return renormalize ? std::log1p(v) : v;
  };
  double sum = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int jx = axis == Axis::x ? ix + s : ix;
      const int jy = axis == Axis::y ? iy + s : iy;
      if (jx >= n || jy >= n) continue;
      sum += std::abs(value(jx, jy) - value(ix, iy));
    }
  const double h = f.grid().spacing();
  return sum * h * h;
}

/// Same with a real shift, which must be a whole number of cells.
inline double translation_modulus(const ScalarField &f, Axis axis, double shift,
                                  bool renormalize) {
  const double cells = shift / f.grid().spacing();
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9)
    throw SolverError(ErrorKind::invalid_input,
                      "translation_modulus: shift is not a multiple of the grid spacing");
  return translation_modulus(f, axis, static_cast<int>(rounded), renormalize);
}

// ---------------------------------------------------------------------------
// Exceptional lines
// ---------------------------------------------------------------------------


struct ExceptionalSet {
  double measure = 0.0;
  std::vector<int> lines;     ///< flagged row (x pair) or column (y pair) indices
  double max_first_off = 0.0; ///< max of F1 (F3) off the flagged lines
  double max_second_off = 0.0;
  double bound_first = 0.0;   ///< (L/e) exp(2L/e)
  double bound_second = 0.0;  ///< 2 (L/e) exp(2L/e)
};

/// Lines where the incoming data of the backward member or the outgoing
/// trace of the forward member reach Lambda/epsilon, together with the
/// pointwise bounds that hold off those lines.
inline ExceptionalSet exceptional_set(const FieldQuartet &f, const BoundaryTrace &fb, double k,
                                      double epsilon, double lambda, bool x_pair,
                                      CellRule rule = CellRule::midpoint) {
  if (!(epsilon > 0.0) || !(lambda > 0.0))
    throw SolverError(ErrorKind::invalid_input, "exceptional_set: epsilon and Lambda must be > 0");
  const int n = f.n();
  const double level = lambda / epsilon;
  const Direction first = x_pair ? Direction::x_forward : Direction::y_forward;
  const Direction second = x_pair ? Direction::x_backward : Direction::y_backward;
  const auto traces = outflow_traces(f, fb, KineticSystem::truncated(k), rule);

  ExceptionalSet es;
  for (int line = 0; line < n; ++line) {
    const bool flagged =
        fb.value(second, line) >= level || traces[index_of(first)][line] >= level;
    if (flagged) {
      es.lines.push_back(line);
      continue;
    }
    for (int s = 0; s < n; ++s) {
      const int ix = x_pair ? s : line, iy = x_pair ? line : s;
      es.max_first_off = std::max(es.max_first_off, f[first](ix, iy));
      es.max_second_off = std::max(es.max_second_off, f[second](ix, iy));
    }
  }
  es.measure = static_cast<double>(es.lines.size()) / n;
  es.bound_first = level * std::exp(2.0 * level);
  es.bound_second = 2.0 * es.bound_first;
  return es;
}

// ---------------------------------------------------------------------------
// Renormalised weak residual
// ---------------------------------------------------------------------------

/// Test function x^a y^b.
struct Monomial {
  int a = 0;
  int b = 0;

  double operator()(double x, double y) const noexcept { return std::pow(x, a) * std::pow(y, b); }
  double dx(double x, double y) const noexcept {
    return a == 0 ? 0.0 : a * std::pow(x, a - 1) * std::pow(y, b);
  }
  double dy(double x, double y) const noexcept {
    return b == 0 ? 0.0 : b * std::pow(x, a) * std::pow(y, b - 1);
  }
};

/// x^a y^b for a, b in {0, 1, 2}; includes the constant 1.
inline std::vector<Monomial> default_test_functions() {
  std::vector<Monomial> v;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b) v.push_back({a, b});
  return v;
}

/// Mismatch of the weak renormalised identity of each component, maximised
/// over the test functions. For F1 the identity reads
///
///   int phi(1,y) ln(1+F1(1,y)) dy - int phi(0,y) ln(1 + fb1 ^ k/2) dy
///     - int ln(1+F1) d_x phi  =  int phi Q_k / (1 + F1),
///
/// with Q_k the truncated collision; the other components follow by the
/// direction of travel and the sign of Q_k.
inline std::array<double, 4> renormalized_residual(const FieldQuartet &f, const BoundaryTrace &fb,
                                                   double k,
                                                   const std::vector<Monomial> &tests,
                                                   CellRule rule = CellRule::midpoint) {
  const Grid grid = f.grid();
  const int n = grid.n_cells();
  const double h = grid.spacing();
  const auto traces = outflow_traces(f, fb, KineticSystem::truncated(k), rule);
  const ScalarField q = truncated_collision(f, k);

  std::array<double, 4> worst{};
  for (Direction d : all_directions) {
    const int c = index_of(d);
    const double sign_q = along_x(d) ? 1.0 : -1.0;
    const double sign_v = is_forward(d) ? 1.0 : -1.0;
    for (const Monomial &phi : tests) {
      double boundary = 0.0;
      for (int line = 0; line < n; ++line) {
        const double t = grid.center(line);
        const double in = std::log1p(std::min(fb.value(d, line), 0.5 * k));
        const double out = std::log1p(traces[c][line]);
        // outgoing face coordinate is 1 for forward directions, 0 otherwise
        const double at_out = is_forward(d) ? 1.0 : 0.0;
        const double at_in = 1.0 - at_out;
        const double phi_out = along_x(d) ? phi(at_out, t) : phi(t, at_out);
        const double phi_in = along_x(d) ? phi(at_in, t) : phi(t, at_in);
        boundary += phi_out * out - phi_in * in;
      }
      boundary *= h;

      double volume = 0.0, source = 0.0;
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
          const double x = grid.center(ix), y = grid.center(iy);
          const double v = f[c](ix, iy);
          const double dphi = along_x(d) ? phi.dx(x, y) : phi.dy(x, y);
          volume += std::log1p(v) * dphi;
          source += phi(x, y) * sign_q * q(ix, iy) / (1.0 + v);
        }
      volume *= h * h;
      source *= h * h;
      const double mismatch = boundary - sign_v * volume - source;
      worst[c] = std::max(worst[c], std::abs(mismatch));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Aggregate report
// ---------------------------------------------------------------------------

struct DiagnosticsOptions {
  double k = 8.0;
  CellRule rule = CellRule::midpoint;
  double epsilon = 0.5;
  double lambda = 2.0;
  std::vector<int> shifts{1, 2, 4};
  std::vector<Monomial> test_functions = default_test_functions();
};

struct ModulusEntry {
  int component = 1; ///< 1..4
  Axis axis = Axis::x;
  int shift_cells = 0;
  double h = 0.0;
  double raw = 0.0;
  double renormalized = 0.0;
};

struct DiagnosticsReport {
  std::array<double, 4> component_masses{};
  double total_mass = 0.0;
  double boundary_mass = 0.0;
  FluxBalance flux;
  double line_conservation_max_dev = 0.0;
  double entropy_boundary = 0.0;
  EntropyProduction entropy_production;
  EntropyProduction dissipation_untruncated;
  double tail_threshold = 0.0;
  double tail_mass = 0.0;
  std::vector<ModulusEntry> translation_moduli;
  double epsilon = 0.0;
  double lambda = 0.0;
  ExceptionalSet exceptional_x;
  ExceptionalSet exceptional_y;
  std::array<double, 4> renorm_residuals{};

  /// Flat, ordered key/value view used by the serialisers.
  std::vector<std::pair<std::string, double>> flatten() const {
    std::vector<std::pair<std::string, double>> kv;
    for (int c = 0; c < 4; ++c)
      kv.emplace_back("mass_F" + std::to_string(c + 1), component_masses[c]);
    kv.emplace_back("total_mass", total_mass);
    kv.emplace_back("boundary_mass", boundary_mass);
    kv.emplace_back("inflow_total", flux.inflow);
    kv.emplace_back("outflow_total", flux.outflow);
    kv.emplace_back("flux_deviation", flux.deviation);
    kv.emplace_back("line_conservation_max_dev", line_conservation_max_dev);
    kv.emplace_back("entropy_boundary", entropy_boundary);
    kv.emplace_back("entropy_production", entropy_production.value);
    kv.emplace_back("entropy_production_singular_cells", entropy_production.singular_cells);
    kv.emplace_back("dissipation_untruncated", dissipation_untruncated.value);
    kv.emplace_back("dissipation_untruncated_singular_cells",
                    dissipation_untruncated.singular_cells);
    kv.emplace_back("tail_threshold", tail_threshold);
    kv.emplace_back("tail_mass", tail_mass);
    kv.emplace_back("exceptional_epsilon", epsilon);
    kv.emplace_back("exceptional_lambda", lambda);
    kv.emplace_back("exceptional_measure_x", exceptional_x.measure);
    kv.emplace_back("exceptional_max_F1_off", exceptional_x.max_first_off);
    kv.emplace_back("exceptional_max_F2_off", exceptional_x.max_second_off);
    kv.emplace_back("exceptional_measure_y", exceptional_y.measure);
    kv.emplace_back("exceptional_max_F3_off", exceptional_y.max_first_off);
    kv.emplace_back("exceptional_max_F4_off", exceptional_y.max_second_off);
    kv.emplace_back("exceptional_bound_first", exceptional_x.bound_first);
    kv.emplace_back("exceptional_bound_second", exceptional_x.bound_second);
    for (int c = 0; c < 4; ++c)
      kv.emplace_back("renorm_residual_F" + std::to_string(c + 1), renorm_residuals[c]);
    for (const auto &m : translation_moduli) {
      const std::string key = "modulus_F" + std::to_string(m.component) + "_" +
                              to_string(m.axis) + "_s" + std::to_string(m.shift_cells);
      kv.emplace_back(key + "_raw", m.raw);
      kv.emplace_back(key + "_log", m.renormalized);
    }
    return kv;
  }
};

inline DiagnosticsReport diagnose(const FieldQuartet &f, const BoundaryTrace &fb,
                                  const DiagnosticsOptions &opt) {
  DiagnosticsReport r;
  for (int c = 0; c < 4; ++c) r.component_masses[c] = mass(f[c]);
  r.total_mass = mass(f);
  r.boundary_mass = fb.mass();
  r.flux = flux_balance(f, fb, opt.k, opt.rule);
  r.line_conservation_max_dev = line_conservation(f);
  r.entropy_boundary = fb.entropy();
  r.entropy_production = entropy_production(f, opt.k);
  r.dissipation_untruncated = entropy_dissipation_untruncated(f);
  r.tail_threshold = opt.k;
  r.tail_mass = tail_mass(f, opt.k);
  const double h = f.grid().spacing();
  for (int c = 0; c < 4; ++c)
    for (Axis axis : {Axis::x, Axis::y})
      for (int s : opt.shifts) {
        if (s >= f.n()) continue;
        r.translation_moduli.push_back({c + 1, axis, s, s * h,
                                        translation_modulus(f[c], axis, s, false),
                                        translation_modulus(f[c], axis, s, true)});
      }
  r.epsilon = opt.epsilon;
  r.lambda = opt.lambda;
  r.exceptional_x = exceptional_set(f, fb, opt.k, opt.epsilon, opt.lambda, true, opt.rule);
  r.exceptional_y = exceptional_set(f, fb, opt.k, opt.epsilon, opt.lambda, false, opt.rule);
  r.renorm_residuals = renormalized_residual(f, fb, opt.k, opt.test_functions, opt.rule);
  return r;
}

} // namespace broadwell
