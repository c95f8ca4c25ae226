#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace broadwell;

TEST(SolverParams, ValidatesSchedulesAndTolerances) {
  SolverParams p;
  EXPECT_NO_THROW(p.validate());
  p.k_schedule = {4, 4};
  EXPECT_THROW(p.validate(), SolverError);
  p = {};
  p.alpha_schedule = {0.5, 1.0};
  EXPECT_THROW(p.validate(), SolverError);
  p = {};
  p.alpha_schedule = {1.0, 0.0};
  EXPECT_THROW(p.validate(), SolverError);
  p = {};
  p.tol_outer = 0.0;
  EXPECT_THROW(p.validate(), SolverError);
}

TEST(DampedMap, ZeroInZeroOut) {
  Grid g(6);
  auto fb = BoundaryTrace::constant(g, {0, 0, 0, 0});
  auto r = damped_map(FieldQuartet(g), fb, SolverParams{});
  EXPECT_EQ(r.sweeps, 1);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.field.max_value(), 0.0);
}

TEST(DampedMap, RequiresPositiveDamping) {
  Grid g(4);
  SolverParams p;
  p.alpha = 0.0;
  EXPECT_THROW(damped_map(FieldQuartet(g), BoundaryTrace::constant(g, {1, 1, 1, 1}), p),
               SolverError);
}

TEST(DampedMap, ConstantDataIsMonotoneAndMatchesOracle) {
  Grid g(8);
  const double c = 0.5;
  auto fb = BoundaryTrace::constant(g, {c, c, c, c});
  FieldQuartet frozen(g, c);
  for (double alpha : {0.25, 1.0}) {
    SolverParams p;
    p.alpha = alpha;
    p.moll_radius = 0.2;
    auto r = damped_map(frozen, fb, p); // throws NonMonotone on a decreasing sweep
    ASSERT_TRUE(r.converged);
    EXPECT_LE(mass(r.field), fb.mass() / alpha);
    auto oracle = newton_solve(fb, KineticSystem{p.k, alpha, p.moll_radius}, free_streaming(fb, p.k),
                               CellRule::midpoint, {}, &frozen);
    EXPECT_LE(l1_distance(r.field, oracle.field), 1e-9);
  }
}

TEST(DampedMap, MassCeilingForUnitBoundaryMass) {
  Grid g(16);
  auto fb = BoundaryTrace::constant(g, {0.25, 0.25, 0.25, 0.25});
  ASSERT_DOUBLE_EQ(fb.mass(), 1.0);
  SolverParams p;
  p.alpha = 0.5;
  std::mt19937_64 rng(9);
  auto r = damped_map(bw_test::random_quartet(16, rng, 3.0), fb, p);
  EXPECT_LE(mass(r.field), 2.0);
}

TEST(DampedMap, MassCeilingOnRandomData) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    auto fb = bw_test::random_boundary(12, 100 + trial, 4.0);
    for (double alpha : {0.25, 0.5, 1.0}) {
      SolverParams p;
      p.alpha = alpha;
      p.moll_radius = 0.1;
      auto r = damped_map(bw_test::random_quartet(12, rng, 2.0), fb, p);
      EXPECT_LE(mass(r.field), fb.mass() / alpha * (1 + 1e-12));
    }
  }
}

TEST(PicardFixedPoint, ZeroBoundaryTakesOneIteration) {
  Grid g(8);
  auto sol = picard_fixed_point(BoundaryTrace::constant(g, {0, 0, 0, 0}), SolverParams{});
  EXPECT_EQ(sol.report.path, "picard");
  ASSERT_EQ(sol.report.stages.size(), 1u);
  EXPECT_EQ(sol.report.stages[0].iterations, 1);
  EXPECT_EQ(sol.field.max_value(), 0.0);
}

TEST(PicardFixedPoint, MatchesOracleOnDampedSystem) {
  Grid g(8);
  auto fb = BoundaryTrace::constant(g, {0.2, 0.2, 0.2, 0.2});
  for (double radius : {0.0, 0.25}) {
    SolverParams p = bw_test::tight_params();
    p.alpha = 0.5;
    p.moll_radius = radius;
    auto sol = picard_fixed_point(fb, p);
    ASSERT_TRUE(sol.report.converged);
    EXPECT_LE(mass(sol.field), fb.mass() / p.alpha);
    auto oracle =
        newton_solve(fb, KineticSystem{p.k, p.alpha, radius}, free_streaming(fb, p.k));
    EXPECT_LE(l1_distance(sol.field, oracle.field), 1e-8) << "radius " << radius;
  }
}

TEST(PicardFixedPoint, FallsBackToBracketingAtTheCap) {
  auto fb = bw_test::random_boundary(8, 5, 1.0);
  SolverParams p = bw_test::tight_params();
  p.alpha = 0.5;
  p.moll_radius = 0.2;
  p.max_outer = 1;
  auto capped = picard_fixed_point(fb, p);
  EXPECT_EQ(capped.report.path, "bracket-fallback");
  ASSERT_EQ(capped.report.stages.size(), 2u);
  EXPECT_FALSE(capped.report.stages[0].converged);
  EXPECT_FALSE(capped.report.converged); // one outer sweep is not enough for either path
}

TEST(PairAlternation, SolvesTheDampedSystemToo) {
  auto fb = bw_test::random_boundary(8, 5, 1.0);
  SolverParams p = bw_test::tight_params();
  const KineticSystem sys{8.0, 0.5, 0.2};
  auto alt = solve_by_pair_alternation(fb, sys, p, FieldQuartet(fb.grid()));
  ASSERT_TRUE(alt.converged);
  auto oracle = newton_solve(fb, sys, free_streaming(fb, sys.k));
  EXPECT_LE(l1_distance(alt.field, oracle.field), 1e-8);
}

TEST(AlternatingBracket, ZeroDataConvergesImmediately) {
  Grid g(6);
  PairProblem pp{Pair::x_pair, ScalarField(g), ScalarField(g), std::vector<double>(6, 0.0),
                 std::vector<double>(6, 0.0), 8.0};
  auto r = alternating_bracket_pair(pp, SolverParams{});
  EXPECT_TRUE(r.converged);
  ASSERT_EQ(r.state.width_history.size(), 1u);
  EXPECT_EQ(r.state.width_history[0], 0.0);
  EXPECT_EQ(r.fields[0].max_value(), 0.0);
  EXPECT_EQ(r.fields[1].max_value(), 0.0);
}

TEST(AlternatingBracket, PureAbsorptionPairMatchesOracle) {
  Grid g(8);
  for (Pair pair : {Pair::x_pair, Pair::y_pair}) {
    PairProblem pp{pair, ScalarField(g), ScalarField(g), std::vector<double>(8, 1.5),
                   std::vector<double>(8, 0.7), 8.0};
    SolverParams p = bw_test::tight_params();
    auto r = alternating_bracket_pair(pp, p);
    ASSERT_TRUE(r.converged);
    auto oracle = newton_solve_pair(pp, {ScalarField(g, 1.5), ScalarField(g, 0.7)});
    EXPECT_LE(l1_distance(r.fields[0], oracle.fields[0]) + l1_distance(r.fields[1], oracle.fields[1]),
              1e-9);
  }
}

TEST(AlternatingBracket, WidthShrinksStrictlyAndOrderingHolds) {
  Grid g(16);
  PairProblem pp{Pair::x_pair, ScalarField(g, 0.25), ScalarField(g, 0.25),
                 std::vector<double>(16, 0.5), std::vector<double>(16, 0.5), 8.0};
  auto r = alternating_bracket_pair(pp, bw_test::tight_params());
  ASSERT_TRUE(r.converged);
  const auto &w = r.state.width_history;
  ASSERT_GE(w.size(), 3u);
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i - 1] > 0.0) {
      EXPECT_LT(w[i], w[i - 1]) << "sweep " << i;
    }
  for (int m = 0; m < 2; ++m) {
    auto lo = r.state.lower[m].values(), hi = r.state.upper[m].values();
    for (std::size_t i = 0; i < lo.size(); ++i) EXPECT_LE(lo[i], hi[i]);
  }
  EXPECT_LE(w.back(), 1e-13);
}

TEST(AlternatingBracket, RejectsNegativeGain) {
  Grid g(4);
  PairProblem pp{Pair::y_pair, ScalarField(g, -1.0), ScalarField(g), std::vector<double>(4, 0.0),
                 std::vector<double>(4, 0.0), 8.0};
  EXPECT_THROW(alternating_bracket_pair(pp, SolverParams{}), SolverError);
}

TEST(SolveTruncated, ConstantDataIsTheEquilibrium) {
  for (int n : {8, 32}) {
    auto fb = BoundaryTrace::constant(Grid(n), {0.5, 0.5, 0.5, 0.5});
    auto sol = solve_truncated(fb, 10.0, SolverParams{});
    EXPECT_TRUE(sol.report.converged);
    EXPECT_LE(linf_distance(sol.field, FieldQuartet(Grid(n), 0.5)), 1e-12);
    EXPECT_LE(flux_balance(sol.field, fb, 10.0).deviation, 1e-12);
  }
}

TEST(SolveTruncated, ReferenceProblemMatchesOracle) {
  auto fb = bw_test::reference_boundary(8);
  auto sol = solve_truncated(fb, 8.0, bw_test::tight_params());
  ASSERT_TRUE(sol.report.converged);
  EXPECT_EQ(sol.report.path, "pair-alternation");
  auto oracle = newton_solve(fb, KineticSystem::truncated(8), free_streaming(fb, 8));
  EXPECT_LE(l1_distance(sol.field, oracle.field), 1e-8);
}

TEST(SolveTruncated, MassBoundedByTwiceTheTruncatedBoundaryMass) {
  // Each pair sum is constant along its lines and equals the outgoing trace
  // plus the opposite inflow, so the total mass is at most outflow + inflow.
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto fb = bw_test::random_boundary(16, seed, 6.0);
    const double k = 4.0;
    auto sol = solve_truncated(fb, k, bw_test::tight_params());
    ASSERT_TRUE(sol.report.converged);
    const double cb = 2.0 * truncate_boundary(fb, k).mass();
    EXPECT_LE(mass(sol.field), cb * (1 + 1e-12));
  }
}

TEST(SolveTruncated, WarmStartReachesTheSameSolution) {
  auto fb = bw_test::random_boundary(12, 8, 3.0);
  auto p = bw_test::tight_params();
  auto cold = solve_truncated(fb, 8.0, p);
  auto prev = solve_truncated(fb, 4.0, p);
  auto warm = solve_truncated(fb, 8.0, p, &prev.field);
  EXPECT_LE(l1_distance(cold.field, warm.field), 1e-9);
  EXPECT_THROW(solve_truncated(bw_test::random_boundary(8, 8), 8.0, p, &prev.field), SolverError);
}

TEST(SolveTruncated, NonConvergenceIsReportedNotHidden) {
  auto fb = bw_test::random_boundary(12, 4, 3.0);
  auto p = bw_test::tight_params();
  p.max_outer = 2;
  auto sol = solve_truncated(fb, 8.0, p);
  EXPECT_FALSE(sol.report.converged);
  EXPECT_GT(sol.report.final_increment, p.tol_outer);
}

TEST(Continuation, SingleKMatchesDirectSolve) {
  auto fb = bw_test::random_boundary(8, 12, 1.0);
  auto p = bw_test::tight_params();
  p.k_schedule = {4};
  auto steps = continuation(fb, p);
  ASSERT_EQ(steps.size(), 1u);
  auto direct = solve_truncated(fb, 4.0, p);
  EXPECT_EQ(l1_distance(steps[0].field, direct.field), 0.0);
  EXPECT_FALSE(steps[0].cauchy_increment.has_value());
}

TEST(Continuation, RecordsCauchyIncrementsAndDampedStages) {
  auto fb = bw_test::random_boundary(8, 13, 3.0);
  auto p = bw_test::tight_params();
  p.k_schedule = {2, 8};
  p.alpha_schedule = {1.0, 0.25};
  auto steps = continuation(fb, p);
  ASSERT_EQ(steps.size(), 2u);
  ASSERT_TRUE(steps[1].cauchy_increment.has_value());
  EXPECT_NEAR(*steps[1].cauchy_increment, l1_distance(steps[1].field, steps[0].field), 0.0);
  for (const auto &s : steps) {
    EXPECT_TRUE(s.converged());
    ASSERT_EQ(s.damped.size(), 2u);
    EXPECT_FALSE(s.damped[0].gap_to_previous.has_value());
    EXPECT_TRUE(s.damped[1].gap_to_previous.has_value());
    ASSERT_TRUE(s.damped_gap.has_value());
  }
}

TEST(Continuation, TagsErrorsWithK) {
  auto fb = bw_test::random_boundary(8, 14, 1.0);
  auto p = bw_test::tight_params();
  p.k_schedule = {2, 8};
  p.cell_rule = CellRule::midpoint;
  p.alpha_schedule = {400.0}; // alpha*h = 50 > 2: the midpoint cell loses positivity
  try {
    continuation(fb, p);
    FAIL() << "expected a solver error";
  } catch (const SolverError &e) {
    EXPECT_EQ(e.kind(), ErrorKind::positivity_loss);
    EXPECT_NE(std::string(e.what()).find("k = 2.0000"), std::string::npos);
  }
}
