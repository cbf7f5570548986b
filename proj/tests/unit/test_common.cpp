#include "bsgd/common.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace bsgd;

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next(), b.next());
  EXPECT_EQ(a, b);
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(1);
  for (int k = 0; k < 10000; ++k) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  Rng r(5);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double v = r.normal();
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Sampling, WithoutReplacementSortedAndDistinct) {
  Rng r(3);
  for (int trial = 0; trial < 200; ++trial) {
    const IndexList s = sample_without_replacement(r, 20, 7);
    ASSERT_EQ(s.size(), 7u);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::set<Index>(s.begin(), s.end()).size(), 7u);
    for (Index v : s) {
      EXPECT_GE(v, 0);
      EXPECT_LT(v, 20);
    }
  }
}

TEST(Sampling, FullSelectionConsumesNoRandomness) {
  Rng a(9), b(9);
  const IndexList s = sample_without_replacement(a, 5, 5);
  EXPECT_EQ(s, (IndexList{0, 1, 2, 3, 4}));
  EXPECT_EQ(a, b);
}

TEST(Sampling, WithoutReplacementIsUniform) {
  Rng r(11);
  std::vector<int> hits(10, 0);
  const int trials = 50000;
  for (int t = 0; t < trials; ++t)
    for (Index v : sample_without_replacement(r, 10, 3)) ++hits[static_cast<std::size_t>(v)];
  for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / trials, 0.3, 0.01);
}

TEST(Sampling, WeightedFrequencies) {
  Rng r(13);
  const std::vector<double> w = {0.1, 0.0, 0.6, 0.3};
  std::vector<int> hits(4, 0);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) ++hits[static_cast<std::size_t>(sample_weighted(r, w))];
  EXPECT_EQ(hits[1], 0);
  EXPECT_NEAR(hits[0] / double(trials), 0.1, 0.01);
  EXPECT_NEAR(hits[2] / double(trials), 0.6, 0.01);
  EXPECT_NEAR(hits[3] / double(trials), 0.3, 0.01);
}

TEST(Sampling, SingleWeightConsumesNoRandomness) {
  Rng a(2), b(2);
  EXPECT_EQ(sample_weighted(a, {1.0}), 0);
  EXPECT_EQ(a, b);
}
