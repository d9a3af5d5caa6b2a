#include <gtest/gtest.h>

#include <cmath>

#include "tinfv/qos_delay.hpp"
#include "tinfv/rng.hpp"

using namespace tinfv;

TEST(EffectiveBandwidth, SmallThetaLimit) { EXPECT_NEAR(effective_bandwidth(1.0, 1e-8), 1.0, 1e-6); }

TEST(EffectiveBandwidth, ZeroArrivals) { EXPECT_EQ(effective_bandwidth(0.0, 11.0), 0.0); }

TEST(EffectiveBandwidth, ThetaEleven)
{
  // (e^11 - 1) / 11 = 59873.14171519782 / 11
  EXPECT_NEAR(effective_bandwidth(1.0, 11.0), 59873.14171519782 / 11.0, 1e-9);
}

TEST(EffectiveBandwidth, NonPositiveThetaIsDomainError)
{
  EXPECT_THROW(effective_bandwidth(1.0, 0.0), std::domain_error);
  EXPECT_THROW(effective_bandwidth(1.0, -2.0), std::domain_error);
}

TEST(EffectiveBandwidth, NeverBelowArrivalRate)
{
  Rng r(5);
  for (int i = 0; i < 1000; ++i) {
    const double lambda = r.uniform(0.0, 1e6), theta = r.uniform(1e-6, 20.0);
    EXPECT_GE(effective_bandwidth(lambda, theta), lambda * (1.0 - 1e-15));
  }
}

TEST(QueueViolation, ZeroDelayGivesEta)
{
  EXPECT_DOUBLE_EQ(ul_queue_violation(1e3, 11.0, 0.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(dl_queue_violation(1e3, 11.0, 0.0, 0.4), 0.4);
}

TEST(QueueViolation, InverseRelation)
{
  const double delta = 1e-3, theta = 11.0, rate = 2.5e5;
  const double d = std::log(1.0 / delta) / (rate * std::expm1(theta));
  EXPECT_NEAR(ul_queue_violation(rate, theta, d, 1.0), delta, 1e-15);
}

TEST(QueueViolation, DirectEvaluation)
{
  // exp(-1e3 * (e^11 - 1) * 1e-3) = exp(-59873.14...) underflows to 0.
  EXPECT_EQ(ul_queue_violation(1e3, 11.0, 1e-3, 1.0), std::exp(-59873.14171519782));
  // A milder point: Lambda = 1, theta = ln 2, D = 3 -> exp(-3).
  EXPECT_NEAR(ul_queue_violation(1.0, std::log(2.0), 3.0, 0.5), 0.5 * std::exp(-3.0), 1e-15);
}

TEST(MinRateForQueue, Examples)
{
  EXPECT_NEAR(min_rate_for_queue(std::exp(-1.0), std::log(2.0), 1.0), 1.0, 1e-15);
  EXPECT_NEAR(min_rate_for_queue(std::exp(-2.0), std::log(2.0), 1.0), 2.0, 1e-15);
  // ln(1000) / ((e^11 - 1) * 1e-4)
  EXPECT_NEAR(min_rate_for_queue(1e-3, 11.0, 1e-4), 6.907755278982137 / (59873.14171519782 * 1e-4), 1e-9);
  EXPECT_EQ(min_rate_for_queue(1e-3, 11.0, 0.0), kInfeasible);
  EXPECT_THROW(min_rate_for_queue(1.5, 11.0, 1.0), std::domain_error);
}

TEST(MinRateForQueue, Monotonicity)
{
  Rng r(6);
  for (int i = 0; i < 500; ++i) {
    const double delta = r.uniform(1e-6, 0.5), theta = r.uniform(0.1, 15.0), d = r.uniform(1e-6, 1e-2);
    const double base = min_rate_for_queue(delta, theta, d);
    EXPECT_GT(base, min_rate_for_queue(delta, theta, d * 1.1));
    EXPECT_GT(base, min_rate_for_queue(delta, theta * 1.1, d));
    EXPECT_LT(base, min_rate_for_queue(delta * 0.5, theta, d));
  }
}

TEST(MinRateForQueue, ClosesTheViolationChain)
{
  Rng r(7);
  for (int i = 0; i < 500; ++i) {
    const double delta = r.uniform(1e-6, 0.5), theta = r.uniform(0.1, 5.0), d = r.uniform(1e-3, 1.0);
    const double rate = min_rate_for_queue(delta, theta, d);
    EXPECT_NEAR(ul_queue_violation(rate, theta, d, 1.0), delta, 1e-12 * std::max(1.0, delta) + 1e-13);
  }
}

TEST(MinQDelayForRate, ExamplesAndRoundTrip)
{
  EXPECT_NEAR(min_q_delay_for_rate(std::exp(-1.0), std::log(2.0), 2.0), 0.5, 1e-15);
  EXPECT_EQ(min_q_delay_for_rate(1e-3, 11.0, 0.0), kInfeasible);
  const double d = 3.7e-4;
  EXPECT_NEAR(min_q_delay_for_rate(1e-3, 11.0, min_rate_for_queue(1e-3, 11.0, d)), d, 1e-12 * d);
  Rng r(8);
  for (int i = 0; i < 500; ++i) {
    const double delta = r.uniform(1e-6, 0.9), theta = r.uniform(0.1, 15.0), rate = r.uniform(1.0, 1e7);
    const double q = min_q_delay_for_rate(delta, theta, rate);
    EXPECT_NEAR(min_rate_for_queue(delta, theta, q), rate, 1e-12 * rate);
  }
}

TEST(TransmissionDelay, Examples)
{
  EXPECT_DOUBLE_EQ(transmission_delay(1000.0, 1e6), 1e-3);
  EXPECT_EQ(transmission_delay(0.0, 1e6), 0.0);
  EXPECT_EQ(transmission_delay(1000.0, 0.0), kInfeasible);
  // SINR 1 on one 625 kHz subcarrier carries 625 kbit/s.
  const double rate = std::log2(1.0 + 1.0) * (5e6 / 8);
  EXPECT_NEAR(transmission_delay(1000.0, rate), 1.6e-3, 1e-15);
}

TEST(CheckE2e, Examples)
{
  DelayBudget zero;
  zero.cap = 1e-3;
  auto c = check_e2e(zero);
  EXPECT_TRUE(c.feasible);
  EXPECT_DOUBLE_EQ(c.residual, 1e-3);

  DelayBudget even{0.2e-3, 0.2e-3, 0.2e-3, 0.2e-3, 0.2e-3, 1e-3};
  c = check_e2e(even, 1e-15);
  EXPECT_TRUE(c.feasible);
  EXPECT_NEAR(c.residual, 0.0, 1e-15);

  DelayBudget nfs;
  nfs.nfs = 0.5e-3;
  nfs.cap = 1e-3;
  c = check_e2e(nfs);
  EXPECT_TRUE(c.feasible);
  EXPECT_DOUBLE_EQ(c.residual, 0.5e-3);

  DelayBudget over{0.3e-3, 0.3e-3, 0.3e-3, 0.3e-3, 0.0, 1e-3};
  EXPECT_FALSE(check_e2e(over).feasible);
}
