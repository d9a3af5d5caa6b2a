#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "tinfv/rng.hpp"
#include "tinfv/units.hpp"

using namespace tinfv;

TEST(Units, DbmToWatts)
{
  EXPECT_DOUBLE_EQ(dbm_to_watts(30.0), 1.0);
  EXPECT_DOUBLE_EQ(dbm_to_watts(0.0), 0.001);
  // 10^1.6 = 39.810717055349725...
  EXPECT_NEAR(dbm_to_watts(46.0), 39.810717055349725, 1e-12);
  EXPECT_NEAR(dbm_to_watts(46.0), 39.81, 5e-3);
}

TEST(Units, RoundTripAndNoise)
{
  for (double x : {-174.0, -30.0, 0.0, 23.0, 43.0, 46.0}) EXPECT_NEAR(watts_to_dbm(dbm_to_watts(x)), x, 1e-12);
  // -174 dBm/Hz over 625 kHz.
  EXPECT_NEAR(noise_power_watts(-174.0, 625e3), std::pow(10.0, -20.4) * 625e3, 1e-30);
  EXPECT_DOUBLE_EQ(seconds_to_ms(ms_to_seconds(1.5)), 1.5);
}

TEST(Rng, DeterministicPerStream)
{
  auto a = Rng::stream(7, {1, 2, 3});
  auto b = Rng::stream(7, {1, 2, 3});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, StreamsDiffer)
{
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t t = 0; t < 4; ++t) firsts.insert(Rng::stream(s, {t}).next_u64());
  EXPECT_EQ(firsts.size(), 16u);
}

TEST(Rng, UniformAndExponentialMoments)
{
  Rng r(42);
  double su = 0.0, se = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double e = r.exponential();
    ASSERT_GE(e, 0.0);
    se += e;
  }
  EXPECT_NEAR(su / n, 0.5, 5e-3);
  EXPECT_NEAR(se / n, 1.0, 1e-2);
}

TEST(Rng, BelowStaysInRange)
{
  Rng r(3);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(r.below(5), 5u);
  EXPECT_EQ(r.below(0), 0u);
}
