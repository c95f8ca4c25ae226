#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "broadwell/diagnostics.hpp"
#include "broadwell/fixed_point.hpp"
#include "broadwell/params.hpp"

namespace broadwell {

/// One damped, mollified solve run ahead of the truncated solve for a given
/// k. The mollifier radius follows alpha.
struct DampedStage {
  double alpha = 0.0;
  SolveReport report{};
  /// L1 distance to the previous damped stage, or to nothing for the first
  std::optional<double> gap_to_previous;
};

struct ContinuationStep {
  double k = 0.0;
  FieldQuartet field;
  SolveReport report{};
  DiagnosticsReport diagnostics{};
  std::vector<DampedStage> damped{};
  /// L1 distance between the last damped stage and the truncated solution
  std::optional<double> damped_gap{};
  /// L1 distance to the solution at the previous k
  std::optional<double> cauchy_increment{};

  bool converged() const {
    if (!report.converged) return false;
    for (const auto &d : damped)
      if (!d.report.converged) return false;
    return true;
  }
};

/// Compact rendering of k used in stage names and directory names.
inline std::string format_k(double k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", k);
  return buf;
}

/// Solves the truncated system for every k of params.k_schedule in order,
/// warm-starting each solve from the previous k's solution. When an
/// alpha_schedule is given, each k first runs the damped system for every
/// alpha (radius = alpha) and reports how far the damped solutions sit from
/// the truncated one.
inline std::vector<ContinuationStep> continuation(const BoundaryTrace &fb,
                                                  const SolverParams &params,
                                                  DiagnosticsOptions diag = {}) {
  params.validate();
  if (params.k_schedule.empty())
    throw SolverError(ErrorKind::invalid_input, "continuation: k_schedule is empty");

  std::vector<ContinuationStep> steps;
  for (double k : params.k_schedule) {
    try {
      ContinuationStep step{k, FieldQuartet(fb.grid())};
      for (double alpha : params.alpha_schedule) {
        SolverParams p = params;
        p.k = k;
        p.alpha = alpha;
        p.moll_radius = alpha;
        auto sol = picard_fixed_point(fb, p);
        DampedStage stage{alpha, sol.report, std::nullopt};
        if (!step.damped.empty()) stage.gap_to_previous = l1_distance(sol.field, step.field);
        step.field = std::move(sol.field);
        step.damped.push_back(std::move(stage));
      }
      const FieldQuartet damped_last = step.field;

      const FieldQuartet *warm = steps.empty() ? nullptr : &steps.back().field;
      auto sol = solve_truncated(fb, k, params, warm);
      step.field = std::move(sol.field);
      step.report = std::move(sol.report);
      if (!step.damped.empty()) step.damped_gap = l1_distance(damped_last, step.field);
      if (!steps.empty()) step.cauchy_increment = l1_distance(step.field, steps.back().field);

      diag.k = k;
      diag.rule = params.cell_rule;
      step.diagnostics = diagnose(step.field, fb, diag);
      steps.push_back(std::move(step));
    } catch (const SolverError &e) {
      throw SolverError(e.kind(), "at k = " + format_k(k) + ": " + e.what());
    }
  }
  return steps;
}

} // namespace broadwell
