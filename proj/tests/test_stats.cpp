#include <gtest/gtest.h>

#include <omp.h>

#include "oracles.hpp"
#include "wsro/stats.hpp"

using namespace wsro;

namespace {

std::vector<double> draw(Rng& rng, std::size_t n, double shift) {
  std::vector<double> v;
  for (std::size_t t = 0; t < n; ++t) v.push_back(std::round((uniform_unit(rng) + shift) * 100.0) / 100.0);
  return v;
}

}  // namespace

TEST(MeanCI, StudentTInterval) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto ci = mean_ci(x);
  EXPECT_DOUBLE_EQ(ci.mean, 5.5);
  EXPECT_NEAR(ci.sd, 3.0276503540974917, 1e-12);
  // t(0.975, 9) = 2.2621571627982
  const double half = 2.2621571627982 * ci.sd / std::sqrt(10.0);
  EXPECT_NEAR(ci.lo, 5.5 - half, 1e-9);
  EXPECT_NEAR(ci.hi, 5.5 + half, 1e-9);
  EXPECT_THROW(mean_ci(std::vector<double>{1.0}), StatsError);
  EXPECT_THROW(mean_ci(x, 1.0), StatsError);
}

TEST(PermutationTest, ExhaustiveMatchesFullPermutationOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const auto na = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const auto nb = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const auto a = draw(rng, na, 0.0);
    const auto b = draw(rng, nb, trial % 2 ? 0.5 : 0.0);
    const auto r = permutation_test(a, b, 10000, 7);
    EXPECT_TRUE(r.exhaustive);
    EXPECT_NEAR(r.p, oracle::permutation_p(a, b), 1e-12);
  }
}

TEST(PermutationTest, ResampledApproachesExhaustive) {
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = draw(rng, 8, 0.0);
    const auto b = draw(rng, 8, 0.2);
    const auto exact = permutation_test(a, b, 20000, 1);
    const auto mc = permutation_test(a, b, 8000, 1);
    ASSERT_TRUE(exact.exhaustive);
    ASSERT_FALSE(mc.exhaustive);
    EXPECT_NEAR(mc.p, exact.p, 0.03);
  }
}

TEST(PermutationTest, SeparatedGroupsHitResolutionFloor) {
  const std::vector<double> lo{1, 2, 3, 4, 5}, hi{11, 12, 13, 14, 15};
  const auto r = permutation_test(lo, hi);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_DOUBLE_EQ(r.p, 2.0 / 252.0);  // the two fully separated splits
  std::vector<double> a, b;
  for (int t = 0; t < 10; ++t) {
    a.push_back(t);
    b.push_back(100 + t);
  }
  const auto mc = permutation_test(a, b, 10000, 3);
  EXPECT_FALSE(mc.exhaustive);
  EXPECT_LE(mc.p, 3.0 / 10001.0);
  EXPECT_GE(mc.p, 1.0 / 10001.0);
}

TEST(PermutationTest, IndependentOfThreadCount) {
  Rng rng(4);
  const auto a = draw(rng, 10, 0.0), b = draw(rng, 10, 0.1);
  omp_set_num_threads(1);
  const auto one = permutation_test(a, b, 5000, 9);
  omp_set_num_threads(4);
  const auto four = permutation_test(a, b, 5000, 9);
  EXPECT_EQ(one.p, four.p);
}

TEST(PermutationTest, IdenticalGroupsGiveOne) {
  const std::vector<double> a{1, 1, 1}, b{1, 1, 1};
  EXPECT_DOUBLE_EQ(permutation_test(a, b).p, 1.0);
  EXPECT_THROW(permutation_test(std::vector<double>{}, b), StatsError);
}

TEST(CliffsDelta, MatchesDirectCountAndAntisymmetric) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = draw(rng, 1 + uniform_below(rng, 12), 0.0);
    const auto b = draw(rng, 1 + uniform_below(rng, 12), 0.1);
    const double d = cliffs_delta(a, b);
    EXPECT_NEAR(d, oracle::cliffs_delta(a, b), 1e-15);
    EXPECT_NEAR(cliffs_delta(b, a), -d, 1e-15);
    EXPECT_GE(d, -1.0);
    EXPECT_LE(d, 1.0);
  }
  EXPECT_DOUBLE_EQ(cliffs_delta(std::vector<double>{5, 6}, std::vector<double>{1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(cliffs_delta(std::vector<double>{1, 2}, std::vector<double>{1, 2}), 0.0);
}

TEST(CohensD, PooledStandardDeviation) {
  const std::vector<double> a{2, 4, 6}, b{1, 3, 5};
  // Pooled SD = 2, mean gap = 1.
  EXPECT_DOUBLE_EQ(cohens_d(a, b), 0.5);
  EXPECT_DOUBLE_EQ(cohens_d(b, a), -0.5);
  EXPECT_THROW(cohens_d(std::vector<double>{1, 1}, std::vector<double>{1, 1}), StatsError);
  EXPECT_THROW(cohens_d(std::vector<double>{1}, std::vector<double>{2}), StatsError);
}

TEST(Bonferroni, CapsAtOne) {
  EXPECT_DOUBLE_EQ(bonferroni(0.01, 3), 0.03);
  EXPECT_DOUBLE_EQ(bonferroni(0.5, 3), 1.0);
}

TEST(AverageTrajectories, SkipsMissingPoints) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto b = average_trajectories({{1, 2, nan}, {3, nan, nan}, {5, 4, nan}});
  EXPECT_DOUBLE_EQ(b.mean[0], 3.0);
  EXPECT_DOUBLE_EQ(b.sd[0], 2.0);
  EXPECT_DOUBLE_EQ(b.mean[1], 3.0);
  EXPECT_TRUE(std::isnan(b.mean[2]));
  EXPECT_THROW(average_trajectories({{1, 2}, {1}}), StatsError);
  const auto one = average_trajectories({{1, 2}});
  EXPECT_DOUBLE_EQ(one.sd[1], 0.0);
}

TEST(RunSummary, DeltaIsFinalMinusInitial) {
  const auto s = summarize_run(2, 4, 99, {-0.1, 0.2, 0.35});
  EXPECT_DOUBLE_EQ(s.initial, -0.1);
  EXPECT_DOUBLE_EQ(s.final_score, 0.35);
  EXPECT_NEAR(s.delta, 0.45, 1e-15);
  EXPECT_THROW(summarize_run(1, 0, 0, {}), StatsError);
}
