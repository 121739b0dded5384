#include <gtest/gtest.h>

#include <array>
#include <numeric>
#include <vector>

#include "typosearch/rng.hpp"

namespace ts = typosearch;

TEST(Rng, Mt19937_64ReferenceValue) {
  // The 10000th output of a default-seeded mt19937_64 is fixed by the standard.
  std::mt19937_64 rng;
  rng.discard(9999);
  EXPECT_EQ(rng(), 9981545732273789042ULL);
}

TEST(Rng, Uniform01InRange) {
  ts::Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = ts::uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, UniformIndexCoversRange) {
  ts::Rng rng(5);
  std::array<int, 7> counts{};
  for (int i = 0; i < 7000; ++i) ++counts[ts::uniform_index(rng, 7)];
  for (int c : counts) EXPECT_GT(c, 800);
  EXPECT_THROW(ts::uniform_index(rng, 0), std::invalid_argument);
}

TEST(Rng, CategoricalConsumesOneDrawAndSkipsZeros) {
  ts::Rng a(9);
  ts::Rng b(9);
  const std::vector<double> w = {0.0, 1.0, 0.0};
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(ts::sample_categorical(a, w), 1u);
    ts::uniform01(b);
  }
  EXPECT_EQ(a(), b());
}

TEST(Rng, CategoricalMatchesWeights) {
  ts::Rng rng(17);
  const std::vector<double> w = {0.1, 0.6, 0.3};
  std::array<int, 3> counts{};
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++counts[ts::sample_categorical(rng, w)];
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(counts[i] / static_cast<double>(n), w[i], 0.015);
  }
}

TEST(Rng, CategoricalRejectsDegenerateWeights) {
  ts::Rng rng(1);
  const std::vector<double> zeros = {0.0, 0.0};
  const std::vector<double> negative = {1.0, -0.5};
  EXPECT_THROW(ts::sample_categorical(rng, zeros), std::invalid_argument);
  EXPECT_THROW(ts::sample_categorical(rng, negative), std::invalid_argument);
}

TEST(Rng, DeriveSeedSeparatesKeys) {
  EXPECT_NE(ts::derive_seed(1, "alpha"), ts::derive_seed(1, "beta"));
  EXPECT_NE(ts::derive_seed(1, "alpha"), ts::derive_seed(2, "alpha"));
  EXPECT_EQ(ts::derive_seed(1, "alpha"), ts::derive_seed(1, "alpha"));
  EXPECT_NE(ts::derive_seed(1, std::uint64_t{0}), ts::derive_seed(1, std::uint64_t{1}));
}

TEST(Rng, ShuffleIsAPermutation) {
  ts::Rng rng(4);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  ts::shuffle(std::span<int>(v), rng);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}
