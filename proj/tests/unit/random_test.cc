#include <cmath>

#include <gtest/gtest.h>

#include "sedlqr/random.h"

namespace sedlqr {
namespace {

using Block = std::array<std::uint64_t, 4>;

// Known answers from numpy.random.Philox; the all-zero one is also the
// Random123 reference vector.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(Philox4x64({0, 0, 0, 0}, {0, 0}),
            (Block{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL,
                   0x7e68b68aec7ba23bULL}));
  EXPECT_EQ(Philox4x64({1, 0, 0, 0}, {5, 3}),
            (Block{0xc0671201ed7f7b5aULL, 0x6958bff49c70be93ULL, 0xb89e1c2384ada39aULL,
                   0xfc897795f0e1ec0aULL}));
  EXPECT_EQ(Philox4x64({7, 0, 0, 0}, {~0ULL, ~0ULL}),
            (Block{0x483138ead7ee07f2ULL, 0x833ced35f2731cf4ULL, 0x6b9b6d180d387e4eULL,
                   0x70df6e62ef09a41cULL}));
}

TEST(CounterRng, WalksBlocksInOrder) {
  CounterRng rng(5, 3);
  for (int i = 0; i < 4; ++i) rng.NextU64();
  EXPECT_EQ(rng.NextU64(), 0xc0671201ed7f7b5aULL);
  EXPECT_EQ(rng.NextU64(), 0x6958bff49c70be93ULL);
}

TEST(CounterRng, UniformOpenInterval) {
  CounterRng rng(1, 2);
  double lo = 1, hi = 0, sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.Uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / 1e5, 0.5, 0.005);
}

TEST(CounterRng, NormalMoments) {
  CounterRng rng(9, 0);
  double s1 = 0, s2 = 0, s4 = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.Normal();
    s1 += x, s2 += x * x, s4 += x * x * x * x;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  EXPECT_NEAR(s4 / n, 3.0, 0.06);
}

// Stream means across many (seed, stream) pairs behave like independent
// draws: their spread matches 1/sqrt(n).
TEST(CounterRng, StreamsIndependent) {
  const int streams = 200, n = 2000;
  double ss = 0;
  for (int s = 0; s < streams; ++s) {
    CounterRng rng(7, s);
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += rng.Normal();
    const double z = sum / std::sqrt(double(n));
    ss += z * z;
  }
  EXPECT_NEAR(ss / streams, 1.0, 0.3);
}

}  // namespace
}  // namespace sedlqr
