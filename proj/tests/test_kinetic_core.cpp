#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace broadwell;

TEST(Grid, CellCentresAndSpacing) {
  Grid g(4);
  EXPECT_EQ(g.spacing() * g.n_cells(), 1.0);
  EXPECT_DOUBLE_EQ(g.center(0), 0.125);
  EXPECT_DOUBLE_EQ(g.center(3), 0.875);
  EXPECT_THROW(Grid(1), std::invalid_argument);
}

TEST(BoundaryTrace, RejectsNegativeAndNonFiniteSamples) {
  Grid g(2);
  auto with_first = [&](std::vector<double> first) {
    return BoundaryTrace(g, {std::move(first), std::vector<double>{0, 0},
                             std::vector<double>{0, 0}, std::vector<double>{0, 0}});
  };
  EXPECT_NO_THROW(with_first({0.1, 0.0}));
  EXPECT_THROW(with_first({0.1, -0.1}), std::invalid_argument);
  EXPECT_THROW(with_first({0.1, NAN}), std::invalid_argument);
  EXPECT_THROW(with_first({0.1}), std::invalid_argument);
}

TEST(BoundaryTrace, MassAndEntropy) {
  auto fb = BoundaryTrace::constant(Grid(8), {1.0, 2.0, 0.5, 0.0});
  EXPECT_DOUBLE_EQ(fb.mass(), 3.5);
  EXPECT_NEAR(fb.entropy(), 2.0 * std::log(2.0), 1e-15); // only samples above 1 count
}

TEST(TruncatedCollision, ConstantQuartetIsInEquilibrium) {
  for (double k : {0.5, 8.0, 1e6})
    EXPECT_EQ(truncated_collision(0.7, 0.7, 0.7, 0.7, k), 0.0);
}

TEST(TruncatedCollision, LargeKRecoversQuadraticCollision) {
  EXPECT_NEAR(truncated_collision(1, 2, 3, 4, 1e9), 10.0, 1e-6);
}

TEST(TruncatedCollision, SaturatedValueAtKEqualsTwo) {
  EXPECT_DOUBLE_EQ(truncated_collision(2, 2, 0, 0, 2), -1.0);
}

TEST(TruncatedCollision, FieldOverloadMatchesPointwise) {
  FieldQuartet f{Grid(2)};
  f[0](1, 0) = 2.0;
  f[1](1, 0) = 2.0;
  const ScalarField q = truncated_collision(f, 2.0);
  EXPECT_DOUBLE_EQ(q(1, 0), -1.0);
  EXPECT_DOUBLE_EQ(q(0, 0), 0.0);
}

TEST(TruncatedCollision, AntisymmetryBoundAndMonotoneSaturation) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 50.0), kd(0.1, 20.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng), k = kd(rng);
    EXPECT_EQ(truncated_collision(a, b, c, d, k), -truncated_collision(c, d, a, b, k));
    EXPECT_LE(std::abs(truncated_collision(a, b, c, d, k)), k * k);
    const double lo = std::min(a, b), hi = std::max(a, b);
    EXPECT_LE(saturate(lo, k), saturate(hi, k));
    EXPECT_LT(saturate(hi, k), k);
  }
}

TEST(TruncateBoundary, CapsAtHalfK) {
  Grid g(4);
  auto below = truncate_boundary(BoundaryTrace::constant(g, {0.3, 0.3, 0.3, 0.3}), 10);
  for (double v : below.profile(0)) EXPECT_EQ(v, 0.3);
  auto capped = truncate_boundary(BoundaryTrace::constant(g, {7, 7, 7, 7}), 4);
  for (int c = 0; c < 4; ++c)
    for (double v : capped.profile(c)) EXPECT_EQ(v, 2.0);
  auto at_cap = truncate_boundary(BoundaryTrace::constant(g, {2, 2, 2, 2}), 4);
  for (double v : at_cap.profile(1)) EXPECT_EQ(v, 2.0);
}

TEST(TruncateBoundary, IdempotentAndMonotoneInK) {
  auto fb = bw_test::random_boundary(16, 3, 20.0);
  auto once = truncate_boundary(fb, 6);
  auto twice = truncate_boundary(once, 6);
  auto wider = truncate_boundary(fb, 12);
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 16; ++i) {
      EXPECT_EQ(once.profile(c)[i], twice.profile(c)[i]);
      EXPECT_LE(once.profile(c)[i], wider.profile(c)[i]);
    }
}

TEST(Mollifier, ZeroRadiusIsIdentity) {
  std::mt19937_64 rng(1);
  auto f = bw_test::random_quartet(8, rng, 3.0);
  Mollifier m(Grid(8), 0.0);
  EXPECT_TRUE(m.is_identity());
  EXPECT_EQ(l1_distance(m.apply(f), f), 0.0);
}

TEST(Mollifier, PreservesConstantsAwayFromTheBoundary) {
  Grid g(40);
  const double radius = 0.1;
  ScalarField one(g, 1.0);
  const ScalarField out = mollify(one, radius);
  for (int iy = 0; iy < 40; ++iy)
    for (int ix = 0; ix < 40; ++ix) {
      const double x = g.center(ix), y = g.center(iy);
      if (std::min({x, y, 1 - x, 1 - y}) > radius) {
        EXPECT_NEAR(out(ix, iy), 1.0, 1e-12);
      }
      EXPECT_LE(out(ix, iy), 1.0 + 1e-12);
    }
}

TEST(Mollifier, SpikeStaysNonnegativeAndDoesNotGainMass) {
  Grid g(16);
  ScalarField spike(g);
  spike(0, 3) = 1.0;
  const ScalarField out = mollify(spike, 0.2);
  double total = 0.0;
  for (double v : out.values()) {
    EXPECT_GE(v, 0.0);
    total += v;
  }
  EXPECT_LE(total, 1.0 + 1e-15);
  EXPECT_LT(total, 1.0); // the spike sits on the edge: zero extension loses mass
}

TEST(Mollifier, NeverIncreasesMassOfRandomFields) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = bw_test::random_quartet(12, rng, 2.0);
    const auto m = Mollifier(Grid(12), 0.05 + 0.02 * trial).apply(f);
    EXPECT_LE(mass(m), mass(f) * (1 + 1e-14));
    EXPECT_GE(m.min_value(), 0.0);
  }
}

TEST(Mass, Quadrature) {
  EXPECT_EQ(mass(ScalarField(Grid(8), 1.0)), 1.0);
  EXPECT_DOUBLE_EQ(mass(ScalarField(Grid(7), 1.0)), 1.0);
  EXPECT_EQ(mass(ScalarField(Grid(7), 0.0)), 0.0);
  EXPECT_EQ(mass(FieldQuartet(Grid(16), 0.5)), 2.0);
}

TEST(FieldQuartet, RequireNonnegativeFlagsBadEntries) {
  FieldQuartet f{Grid(3)};
  EXPECT_NO_THROW(require_nonnegative(f, "test"));
  f[2](1, 1) = -1e-3;
  EXPECT_THROW(require_nonnegative(f, "test"), std::logic_error);
}
