#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fhardy/sets1d.hpp"

using namespace fhardy;

namespace {

// ∫ u v computed cell by cell on the merged breakpoint grid.
double inner_product(const StepFunction& u, const StepFunction& v) {
  std::vector<double> x = u.breakpoints();
  x.insert(x.end(), v.breakpoints().begin(), v.breakpoints().end());
  std::sort(x.begin(), x.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i + 1] <= x[i]) continue;
    const double m = 0.5 * (x[i] + x[i + 1]);
    sum += u(m) * v(m) * (x[i + 1] - x[i]);
  }
  return sum;
}

StepFunction random_step(std::mt19937_64& rng, int cells) {
  std::uniform_real_distribution<double> w(0.05, 1.0), val(0.0, 3.0);
  std::bernoulli_distribution zero(0.2);
  std::vector<double> x{std::uniform_real_distribution<double>(-3.0, 3.0)(rng)};
  std::vector<double> v;
  for (int i = 0; i < cells; ++i) {
    x.push_back(x.back() + w(rng));
    v.push_back(zero(rng) ? 0.0 : val(rng));
  }
  v.front() = 1.0;
  return StepFunction(x, v);
}

}  // namespace

TEST(IntervalUnion, Validation) {
  EXPECT_THROW(IntervalUnion({{1.0, 0.0}}), domain_error);
  EXPECT_THROW(IntervalUnion({{0.0, 2.0}, {1.0, 3.0}}), domain_error);
  IntervalUnion touching{{-1.0, 0.0}, {0.0, 1.0}};
  EXPECT_EQ(touching.size(), 2u);
  EXPECT_FALSE(touching.contains(0.0));
  EXPECT_TRUE(touching.contains(0.5));
  EXPECT_FALSE(touching.contains(1.0));
  EXPECT_DOUBLE_EQ(touching.measure(), 2.0);
}

TEST(Distance, Examples) {
  EXPECT_DOUBLE_EQ(distance(Domain1D::bounded({{0.0, 1.0}}), 0.3), 0.3);
  EXPECT_DOUBLE_EQ(distance(Domain1D::halfline(), 2.0), 2.0);
  EXPECT_DOUBLE_EQ(distance(Domain1D::punctured(), -2.5), 2.5);
  EXPECT_DOUBLE_EQ(distance(Domain1D::bounded({{-1.0, 0.0}, {0.0, 1.0}}), 0.5), 0.5);
  EXPECT_DOUBLE_EQ(distance(Domain1D::bounded({{-1.0, 0.0}, {0.0, 1.0}}), 0.1), 0.1);
  EXPECT_THROW(distance(Domain1D::bounded({{-1.0, 0.0}, {0.0, 1.0}}), 0.0), domain_error);
  EXPECT_THROW(distance(Domain1D::halfline(), -1.0), domain_error);
}

TEST(Distance, OneLipschitz) {
  const auto omega = Domain1D::bounded({{-3.0, -1.0}, {0.0, 0.5}, {0.5, 4.0}});
  const double h = 1e-4;
  for (double x = -2.99; x < 3.99; x += 0.01) {
    if (!omega.contains(x) || !omega.contains(x + h)) continue;
    if (omega.components().component_of(x) != omega.components().component_of(x + h)) continue;
    EXPECT_LE(std::abs(distance(omega, x + h) - distance(omega, x)), h * (1 + 1e-9));
  }
}

TEST(DeltaLevelset, Examples) {
  EXPECT_DOUBLE_EQ(delta_levelset_measure(2.0, 0.5, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(delta_levelset_measure(2.0, 0.5, 2.0), 0.5);
  EXPECT_LT(delta_levelset_measure(2.0, 0.5, 1e8), 1e-15);
  EXPECT_THROW(delta_levelset_measure(2.0, 0.5, 0.0), domain_error);
  // continuous at the threshold t = 2^s |I|^{-s}
  const double t = std::pow(2.0, 0.3) * std::pow(3.0, -0.3);
  EXPECT_NEAR(delta_levelset_measure(3.0, 0.3, t * (1 + 1e-12)), 3.0, 1e-9);
}

TEST(DeltaLevelset, MatchesSampledDistance) {
  // brute-force |{d_I^{-s} > t}| on a fine grid
  const Interval I{1.0, 3.5};
  const auto omega = Domain1D::bounded({I});
  const int M = 200000;
  for (double t : {0.3, 0.8, 1.0, 1.5, 4.0}) {
    int count = 0;
    for (int i = 0; i < M; ++i) {
      const double x = I.a + (i + 0.5) * I.length() / M;
      if (std::pow(distance(omega, x), -0.4) > t) ++count;
    }
    EXPECT_NEAR(delta_levelset_measure(I, 0.4, t), count * I.length() / M, 2e-4);
  }
}

TEST(RearrangeDelta, Profiles) {
  const auto one = rearrange_delta_equal(1, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(one(0.25), 2.0);
  EXPECT_DOUBLE_EQ(one(1.0), 0.0);
  const auto three = rearrange_delta_equal(3, 1.0, 0.5);
  EXPECT_NEAR(three(2.0), std::sqrt(3.0) / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(three(-3.0), 0.0);
  EXPECT_DOUBLE_EQ(three.support_radius(), 3.0);
}

TEST(RearrangeDelta, DistributionIsNTimesSingleInterval) {
  for (int n : {1, 2, 5})
    for (double r : {0.5, 1.0, 2.0}) {
      const auto prof = rearrange_delta_equal(n, r, 0.35);
      for (double t = 0.05; t < 20.0; t *= 1.3)
        EXPECT_NEAR(prof.distribution(t), n * delta_levelset_measure(2.0 * r, 0.35, t), 1e-12 * n * r);
    }
}

TEST(RearrangeRadius, MatchesMinSumOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rr(0.1, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> radii(1 + trial % 5);
    for (auto& r : radii) r = rr(rng);
    std::sort(radii.begin(), radii.end());
    for (double t = 0.05; t < 50.0; t *= 1.17) {
      double oracle = 0.0;
      for (double r : radii) oracle += std::min(r, std::pow(t, -1.0 / 0.6));
      EXPECT_NEAR(rearrange_radius(radii, 0.6, t), oracle, 1e-12 * oracle);
    }
  }
}

TEST(RearrangeRadius, SpecialCases) {
  const std::vector<double> equal(4, 1.5);
  const auto prof = rearrange_delta_equal(4, 1.5, 0.5);
  for (double t = 0.1; t < 10; t *= 1.5) EXPECT_NEAR(2.0 * rearrange_radius(equal, 0.5, t), prof.distribution(t), 1e-12);
  const std::vector<double> radii{0.5, 1.0, 2.0};
  EXPECT_DOUBLE_EQ(rearrange_radius(radii, 0.5, std::pow(2.0, -0.5)), 3.5);
  EXPECT_DOUBLE_EQ(rearrange_radius(radii, 0.5, 0.1), 3.5);
  EXPECT_NEAR(rearrange_radius(radii, 0.5, 1e6), 3e-12, 1e-20);
  EXPECT_THROW(rearrange_radius({2.0, 1.0}, 0.5, 1.0), domain_error);
}

TEST(StepFunction, CanonicalForm) {
  StepFunction u({0, 1, 2, 3, 4}, {0, 1, 1, 0});
  EXPECT_EQ(u.breakpoints(), (std::vector<double>{1, 3}));
  EXPECT_EQ(u.values(), (std::vector<double>{1}));
  EXPECT_THROW(StepFunction({0, 1}, {-1.0}), domain_error);
  EXPECT_TRUE(StepFunction({0, 1}, {0.0}).is_zero());
  const auto ind = StepFunction::indicator(IntervalUnion{{-1, 0}, {0, 1}, {2, 3}});
  EXPECT_EQ(ind.breakpoints(), (std::vector<double>{-1, 1, 2, 3}));
  EXPECT_EQ(ind.values(), (std::vector<double>{1, 0, 1}));
}

TEST(RearrangeStep, Examples) {
  const auto r = rearrange_step(StepFunction({0, 1}, {1.0}));
  EXPECT_TRUE(r.approx_equal(StepFunction({-0.5, 0.5}, {1.0})));

  // 1_{(0,3)} + 1_{(1,2)}: levels of measure 3 and 1
  const StepFunction u({0, 1, 2, 3}, {1, 2, 1});
  const auto ur = rearrange_step(u);
  EXPECT_TRUE(ur.approx_equal(StepFunction({-1.5, -0.5, 0.5, 1.5}, {1, 2, 1})));
  EXPECT_DOUBLE_EQ(ur.measure_above(0.5), 3.0);
  EXPECT_DOUBLE_EQ(ur.measure_above(1.5), 1.0);
  EXPECT_TRUE(rearrange_step(StepFunction()).is_zero());
}

TEST(RearrangeStep, EquimeasurableIdempotentSymmetric) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = random_step(rng, 2 + trial % 9);
    const auto ur = rearrange_step(u);
    for (double t = 0.0; t < 3.0; t += 0.05) EXPECT_NEAR(ur.measure_above(t), u.measure_above(t), 1e-12);
    EXPECT_NEAR(ur.integral(), u.integral(), 1e-12 * u.integral());
    EXPECT_TRUE(rearrange_step(ur).approx_equal(ur));
    for (double x = 0.01; x < 5; x += 0.07) {
      EXPECT_EQ(ur(x), ur(-x));
      EXPECT_LE(ur(x + 0.07), ur(x));
    }
  }
}

TEST(RearrangeStep, HardyLittlewood) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto u = random_step(rng, 1 + trial % 7);
    const auto v = random_step(rng, 1 + trial % 5);
    EXPECT_LE(inner_product(u, v), inner_product(rearrange_step(u), rearrange_step(v)) + 1e-12);
  }
}

TEST(RearrangeStep, CommutesWithMonotoneMaps) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 60; ++trial) {
    const auto u = random_step(rng, 3 + trial % 6);
    for (double p : {1.0, 2.0, 3.0}) {
      auto phi = [p](double t) { return std::pow(t, p); };
      EXPECT_TRUE(rearrange_step(u.map(phi)).approx_equal(rearrange_step(u).map(phi), 1e-12));
    }
  }
}

TEST(BallDelta, Values) {
  for (double rho : {0.1, 0.5, 0.9}) EXPECT_NEAR(ball_delta_rearranged(1, 0.4, rho), std::pow(rho, -0.4), 1e-13);
  for (double s : {0.1, 0.5, 0.9})
    EXPECT_NEAR(ball_delta_rearranged(2, s, std::sqrt(3.0) / 2.0), std::pow(2.0, s), 1e-12);
  for (int N : {1, 2, 3, 5}) {
    double prev = inf;
    for (double rho = 1e-4; rho < 1.0; rho += 1e-3) {
      const double v = ball_delta_rearranged(N, 0.5, rho);
      EXPECT_LE(v, prev);
      prev = v;
    }
  }
  EXPECT_TRUE(std::isfinite(ball_delta_rearranged(3, 0.5, 1e-6)));
  EXPECT_THROW(ball_delta_rearranged(2, 0.5, 1.0), domain_error);
  EXPECT_THROW(ball_delta_rearranged(2, 0.5, 0.0), domain_error);
}

TEST(DomainGrammar, Parse) {
  EXPECT_EQ(parse_domain("halfline").kind(), Domain1D::Kind::halfline);
  EXPECT_EQ(parse_domain(" punctured ").kind(), Domain1D::Kind::punctured);
  const auto d = parse_domain("interval(-1, 1)");
  EXPECT_TRUE(d.is_bounded());
  EXPECT_EQ(d.components(), (IntervalUnion{{-1, 1}}));
  EXPECT_EQ(parse_domain("union[(0,1),(2,3.5)]").components(), (IntervalUnion{{0, 1}, {2, 3.5}}));
  EXPECT_EQ(parse_domain("union[(-1,0),(0,1)]").components().size(), 2u);
}

TEST(DomainGrammar, PuncturedBox) {
  EXPECT_EQ(parse_domain("punctured_box(2)").components(), (IntervalUnion{{-2, -1}, {-1, 0}, {0, 1}, {1, 2}}));
  EXPECT_EQ(parse_domain("punctured_box(1.5)").components(), (IntervalUnion{{-1.5, -1}, {-1, 0}, {0, 1}, {1, 1.5}}));
  EXPECT_EQ(parse_domain("punctured_box(0.5)").components(), (IntervalUnion{{-0.5, 0}, {0, 0.5}}));
  EXPECT_THROW(parse_domain("punctured_box(20000)"), parse_error);
  EXPECT_THROW(parse_domain("punctured_box(-1)"), parse_error);
}

TEST(DomainGrammar, ErrorsCarryToken) {
  try {
    parse_domain("circle(1)");
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_EQ(e.token(), "circle");
  }
  try {
    parse_domain("interval(0,x)");
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_EQ(e.token(), "x)");
  }
  EXPECT_THROW(parse_domain("interval(1,0)"), parse_error);
  EXPECT_THROW(parse_domain("interval(0,1) junk"), parse_error);
  EXPECT_THROW(parse_domain("union[(0,2),(1,3)]"), parse_error);
  EXPECT_THROW(parse_domain(""), parse_error);
}

TEST(DomainGrammar, RoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> g(0.001, 1.7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Interval> iv;
    double x = -3.0 + g(rng);
    for (int i = 0; i < 1 + trial % 4; ++i) {
      const double a = x, b = a + g(rng);
      iv.push_back({a, b});
      x = b + (trial % 2 ? 0.0 : g(rng));
    }
    const auto d = Domain1D::bounded(IntervalUnion(iv));
    const auto text = format_domain(d);
    EXPECT_EQ(parse_domain(text).components(), d.components()) << text;
  }
  EXPECT_EQ(format_domain(parse_domain("halfline")), "halfline");
  EXPECT_EQ(format_domain(parse_domain("punctured")), "punctured");
}
