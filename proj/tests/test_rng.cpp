#include <gtest/gtest.h>

#include <set>

#include "ggs/rng.hpp"

namespace {

// Sequential splitmix64 as published: state += golden gamma, then finalize.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t operator()() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

}  // namespace

TEST(CounterRng, MatchesSequentialSplitMix) {
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xdeadbeefULL}) {
    ggs::CounterRng rng(seed);
    SplitMix64 ref{seed};
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(rng.next(), ref()) << "seed " << seed << " draw " << i;
  }
}

TEST(CounterRng, KnownFirstOutputForSeedZero) {
  ggs::CounterRng rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
}

TEST(CounterRng, UniformUsesTop53Bits) {
  ggs::CounterRng rng(9);
  SplitMix64 ref{9};
  for (int i = 0; i < 200; ++i) {
    const double expected = -0.1 + 0.2 * (static_cast<double>(ref() >> 11) * 0x1.0p-53);
    ASSERT_EQ(rng.uniform(-0.1, 0.1), expected);
  }
}

TEST(CounterRng, Uniform01StaysInHalfOpenInterval) {
  ggs::CounterRng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(CounterRng, SeekReplaysStream) {
  ggs::CounterRng a(77);
  for (int i = 0; i < 10; ++i) (void)a.next();
  const std::uint64_t eleventh = a.next();
  ggs::CounterRng b(77);
  b.seek(10);
  EXPECT_EQ(b.next(), eleventh);
}

TEST(CounterRng, SplitDoesNotAdvanceParentAndChildrenDiffer) {
  ggs::CounterRng parent(5);
  std::set<std::uint64_t> keys;
  for (std::uint64_t s = 0; s < 64; ++s) keys.insert(parent.split(s).key());
  EXPECT_EQ(keys.size(), 64u);
  EXPECT_EQ(parent.counter(), 0u);
  EXPECT_EQ(parent.split(3).key(), ggs::CounterRng(5).split(3).key());
}

TEST(CounterRng, StreamConstructorMatchesSplit) {
  EXPECT_EQ(ggs::CounterRng(12, 4).key(), ggs::CounterRng(12).split(4).key());
}

TEST(CounterRng, NormalHasRoughlyUnitMoments) {
  ggs::CounterRng rng(2024);
  double s = 0.0, s2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.03);
  EXPECT_NEAR(s2 / n, 1.0, 0.05);
}
