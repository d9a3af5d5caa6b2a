#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "support/fixtures.hpp"
#include "tinfv/oracle.hpp"

using namespace tinfv;

namespace {

ScenarioConfig two_nf_tiny()
{
  auto c = tiny_config();
  c.services[0].chain.resize(std::min<std::size_t>(c.services[0].chain.size(), 2));
  return c;
}

}  // namespace

TEST(Oracle, SingleUserMatchesClosedForm)
{
  auto c = fx::config(1, 1, 1, 1);
  c.services[0].chain = {NfSpec{"f", {1.0}}};
  const auto s = generate(c, 3);
  const auto o = solve_oracle(s);
  ASSERT_TRUE(o.feasible);

  const double C = s.payload(0);
  const double d_ul = C + std::log(1.0 / c.violation_prob_ul) / std::expm1(c.qos_exponent_ul);
  const double d_dl = C + std::log(1.0 / c.violation_prob_dl) / std::expm1(c.qos_exponent_dl);
  const double a_ul = s.gain_ul(0, 0, 0) / s.noise_ul, a_dl = s.gain_dl(0, 0, 0) / s.noise_dl;
  const double proc = C / c.processing_rate_at(0);
  const double radio = s.deadline(0) - proc;
  auto p = [](double demand, double t, double bw, double a) { return std::expm1(std::log(2.0) * demand / (t * bw)) / a; };
  double best = std::numeric_limits<double>::infinity();
  const int N = 200000;
  for (int i = 1; i < N; ++i) {
    const double t = radio * i / N;
    best = std::min(best, p(d_ul, t, s.ul_bandwidth(), a_ul) + p(d_dl, radio - t, s.dl_bandwidth(), a_dl));
  }
  const double expect = c.cost_weight_power * best + c.cost_weight_exec * proc * 1e3;
  EXPECT_LE(o.cost, expect * (1.0 + 1e-9));
  EXPECT_GE(o.cost, expect * (1.0 - 1e-4));
  EXPECT_NEAR(o.exec_cost, c.cost_weight_exec * proc * 1e3, 1e-12);
}

TEST(Oracle, InfeasibleByConstruction)
{
  auto c = tiny_config();
  for (auto& sv : c.services) sv.e2e_delay_max = 1e-7;
  const auto r = run_oracle_comparison(c, 1);
  EXPECT_FALSE(r.oracle.feasible);
  EXPECT_FALSE(r.heuristic.feasible);
}

TEST(Oracle, RefusesOversizedInstances)
{
  EXPECT_THROW(solve_oracle(generate(default_config(), 1)), std::invalid_argument);
}

TEST(Oracle, HeuristicNeverBeatsOracle)
{
  const auto c = two_nf_tiny();
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = run_oracle_comparison(c, seed);
    if (!r.heuristic.feasible) continue;
    EXPECT_TRUE(r.heuristic_passes_checker);
    ASSERT_TRUE(r.oracle.feasible) << "seed " << seed;
    EXPECT_GE(r.heuristic.cost, r.oracle.cost * (1.0 - 1e-9)) << "seed " << seed;
    ++compared;
  }
  EXPECT_GT(compared, 0);
}

TEST(Oracle, HeuristicWithinOneAndAHalfOfOracle)
{
  const auto c = two_nf_tiny();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = run_oracle_comparison(c, seed);
    if (!r.heuristic.feasible) continue;
    EXPECT_LE(r.gap(), 1.5) << "seed " << seed;
  }
}
