#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace broadwell {

/// How a line solve integrates one cell with frozen per-cell coefficients.
///
/// `midpoint` holds the collision term constant over the cell at its centre
/// value; the cell update is the mild form with midpoint quadrature, and
/// paired components conserve F_i + F_j exactly. `exponential` integrates
/// F' = g - aF exactly inside the cell; conservation then holds only to
/// O(h^2).
enum class CellRule { midpoint, exponential };

inline std::string_view to_string(CellRule r) noexcept {
  return r == CellRule::midpoint ? "midpoint" : "exponential";
}

inline CellRule cell_rule_from_string(std::string_view s) {
  if (s == "midpoint") return CellRule::midpoint;
  if (s == "exponential") return CellRule::exponential;
  throw std::invalid_argument("unknown cell rule '" + std::string(s) + "'");
}

enum class ErrorKind {
  invalid_input,
  non_monotone,
  bracket_violation,
  positivity_loss,
  singular_jacobian,
  iteration_cap,
};

inline std::string_view to_string(ErrorKind k) noexcept {
  switch (k) {
  case ErrorKind::invalid_input: return "InvalidInput";
  case ErrorKind::non_monotone: return "NonMonotone";
  case ErrorKind::bracket_violation: return "BracketViolation";
  case ErrorKind::positivity_loss: return "PositivityLoss";
  case ErrorKind::singular_jacobian: return "SingularJacobian";
  case ErrorKind::iteration_cap: return "IterationCap";
  }
  return "Unknown";
}

class SolverError : public std::runtime_error {
public:
  SolverError(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct SolverParams {
  double k = 8.0;
  double alpha = 0.5;
  double moll_radius = 0.0;
  double tol_inner = 1e-12;
  double tol_outer = 1e-10;
  double tol_bracket = 1e-12;
  int max_inner = 2000;
  int max_outer = 500;
  int max_bracket = 2000;
  std::vector<double> k_schedule{8.0};
  std::vector<double> alpha_schedule{};
  CellRule cell_rule = CellRule::midpoint;

  void validate() const {
    auto fail = [](const std::string &m) { throw SolverError(ErrorKind::invalid_input, m); };
    if (!(k > 0.0)) fail("k must be > 0");
    if (!(alpha >= 0.0)) fail("alpha must be >= 0");
    if (!(moll_radius >= 0.0)) fail("moll_radius must be >= 0");
    if (!(tol_inner > 0.0) || !(tol_outer > 0.0) || !(tol_bracket > 0.0))
      fail("tolerances must be > 0");
    if (max_inner < 1 || max_outer < 1 || max_bracket < 1) fail("iteration caps must be >= 1");
    for (std::size_t i = 0; i < k_schedule.size(); ++i) {
      if (!(k_schedule[i] > 0.0)) fail("k_schedule entries must be > 0");
      if (i > 0 && !(k_schedule[i] > k_schedule[i - 1]))
        fail("k_schedule must be strictly increasing");
    }
    for (std::size_t i = 0; i < alpha_schedule.size(); ++i) {
      if (!(alpha_schedule[i] > 0.0)) fail("alpha_schedule entries must be > 0");
      if (i > 0 && !(alpha_schedule[i] < alpha_schedule[i - 1]))
        fail("alpha_schedule must be strictly decreasing");
    }
  }
};

} // namespace broadwell
