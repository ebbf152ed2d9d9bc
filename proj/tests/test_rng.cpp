#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "chshlab/rng.hpp"

namespace {

using chshlab::splitmix64_next;
using chshlab::Xoshiro256pp;

TEST(SplitmixTest, DeterministicAndAdvancing) {
  std::uint64_t x = 12345;
  std::uint64_t y = 12345;
  const std::uint64_t a1 = splitmix64_next(x);
  const std::uint64_t a2 = splitmix64_next(x);
  EXPECT_NE(a1, a2);
  EXPECT_EQ(splitmix64_next(y), a1);
  EXPECT_EQ(splitmix64_next(y), a2);
  EXPECT_EQ(x, y);
}

TEST(XoshiroTest, StreamsAreReproducibleAndDistinct) {
  Xoshiro256pp a(99, 4);
  Xoshiro256pp b(99, 4);
  Xoshiro256pp c(99, 5);
  Xoshiro256pp d(100, 4);
  int differs_c = 0, differs_d = 0;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a.next();
    EXPECT_EQ(va, b.next());
    differs_c += va != c.next();
    differs_d += va != d.next();
  }
  EXPECT_GT(differs_c, 60);
  EXPECT_GT(differs_d, 60);
}

TEST(XoshiroTest, UniformRangeAndMoments) {
  Xoshiro256pp rng(7, 0);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  // 5 sigma on the mean of U(0,1): 5 / sqrt(12 n).
  EXPECT_NEAR(mean, 0.5, 5.0 / std::sqrt(12.0 * n));
  EXPECT_NEAR(var, 1.0 / 12.0, 0.002);
}

TEST(XoshiroTest, NormalMoments) {
  Xoshiro256pp rng(8, 1);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0, sum_4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    ASSERT_TRUE(std::isfinite(z));
    sum += z;
    sum_sq += z * z;
    sum_4 += z * z * z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(static_cast<double>(n)));
  // Var of the sample second moment of N(0,1) is 2/n.
  EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(sum_4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
}

TEST(XoshiroTest, SatisfiesUrbgConcept) {
  static_assert(std::uniform_random_bit_generator<Xoshiro256pp>);
  Xoshiro256pp rng(21, 0);
  std::uniform_int_distribution<int> die(1, 6);
  int counts[7] = {0, 0, 0, 0, 0, 0, 0};
  for (int i = 0; i < 6000; ++i) {
    const int v = die(rng);
    ASSERT_GE(v, 1);
    ASSERT_LE(v, 6);
    ++counts[v];
  }
  for (int f = 1; f <= 6; ++f) EXPECT_GT(counts[f], 800);
}

}  // namespace
