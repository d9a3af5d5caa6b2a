#include <gtest/gtest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "support/independent_checker.hpp"
#include "tinfv/rng.hpp"
#include "tinfv/solver.hpp"

using namespace tinfv;

namespace {

ScenarioConfig with_deadline(ScenarioConfig c, double seconds)
{
  for (auto& s : c.services) s.e2e_delay_max = seconds;
  return c;
}

bool same_allocation(const Allocation& a, const Allocation& b)
{
  return a.ul == b.ul && a.dl == b.dl && a.nfv.executions() == b.nfv.executions() && a.delays == b.delays;
}

bool monotone(const std::vector<double>& trace)
{
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] > trace[i - 1] * (1.0 + 1e-9) + 1e-12) return false;
  return true;
}

}  // namespace

TEST(TotalCost, ZeroAllocation)
{
  const auto s = fx::flat(2, 1, 2, 2);
  Allocation a;
  a.ul = empty_ul(s);
  a.dl = empty_dl(s);
  a.nfv = NfvSchedule(s);
  EXPECT_EQ(total_cost(s, a), 0.0);
}

TEST(TotalCost, TwoWattsAndOneMillisecond)
{
  auto c = fx::config(1, 1, 2, 2);
  c.services[0].payload_bits = 1e6;
  c.services[0].chain = {NfSpec{"f", {1.0}}};
  c.processing_rate = {1e9};
  const auto s = generate(c, 1);
  Allocation a;
  a.ul = empty_ul(s);
  a.dl = empty_dl(s);
  a.ul.set_assigned(0, 0, true);
  a.ul.p(0, 0) = 1.5;
  a.dl.set_assigned(0, 1, true);
  a.dl.p(0, 1) = 0.5;
  a.nfv = NfvSchedule(s);
  a.nfv.dispatch(s, 0, 0, 0);
  EXPECT_NEAR(total_cost(s, a), 3.0, 1e-12);
}

TEST(TotalCost, RecountFromRawFields)
{
  Rng rng(5);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto c = default_config();
    c.cost_weight_power = rng.uniform(0.1, 3.0);
    c.cost_weight_exec = rng.uniform(0.1, 3.0);
    const auto s = generate(c, seed);
    const auto r = solve_joint(s);
    double watts = 0.0;
    for (double p : r.allocation.ul.power) watts += p;
    for (double p : r.allocation.dl.power) watts += p;
    double exec_s = 0.0;
    for (const auto& e : r.allocation.nfv.executions())
      exec_s += s.service_of(e.user).chain[e.nf].coefficient(e.bs) * s.payload(e.user) / c.processing_rate_at(e.bs);
    const double expect = c.cost_weight_power * watts + c.cost_weight_exec * exec_s * 1e3;
    EXPECT_NEAR(total_cost(s, r.allocation), expect, 1e-9 * expect);
    EXPECT_NEAR(r.cost, expect, 1e-9 * expect);
    EXPECT_NEAR(r.cost, r.power_cost + r.exec_cost, 1e-12 * r.cost);
  }
}

TEST(Joint, LooseDeadlineConvergesFeasibly)
{
  SolverSettings st;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto s = generate(with_deadline(default_config(), 1.0), seed);
    const auto r = solve_joint(s, st);
    ASSERT_TRUE(r.feasible) << "seed " << seed;
    EXPECT_LT(r.iterations, st.max_outer_iters) << "seed " << seed;
    EXPECT_TRUE(r.report.all_passed());
    const auto v = check::verify(s, r.allocation);
    EXPECT_TRUE(v.ok()) << (v.ok() ? "" : v.violations.front());
  }
}

TEST(Joint, ReferenceInstancesPassIndependentChecker)
{
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto s = generate(default_config(), seed);
    const auto r = solve_joint(s);
    if (!r.feasible) continue;
    const auto v = check::verify(s, r.allocation);
    EXPECT_TRUE(v.ok()) << "seed " << seed << ": " << (v.ok() ? "" : v.violations.front());
  }
}

TEST(Joint, ScaTracesNeverIncrease)
{
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto r = solve_joint(generate(default_config(), seed));
    for (const auto& t : r.sca_traces) EXPECT_TRUE(monotone(t)) << "seed " << seed;
  }
}

TEST(Joint, ArgminUnchangedWhenBothWeightsScale)
{
  for (double factor : {4.0, 10.0}) {
    auto c = default_config();
    const auto base = solve_joint(generate(c, 2));
    c.cost_weight_power *= factor;
    c.cost_weight_exec *= factor;
    const auto scaled = solve_joint(generate(c, 2));
    EXPECT_EQ(base.feasible, scaled.feasible);
    EXPECT_TRUE(same_allocation(base.allocation, scaled.allocation)) << "factor " << factor;
    EXPECT_NEAR(scaled.cost, factor * base.cost, 1e-9 * scaled.cost);
  }
}

TEST(Joint, RejectsBadSettings)
{
  SolverSettings st;
  st.eps_threshold = 0.0;
  EXPECT_THROW(solve_joint(fx::flat(2, 1, 2, 2), st), ValidationError);
}

TEST(Separate, CarveOutAtDeadlineIsInfeasible)
{
  const auto s = generate(default_config(), 1);
  const auto r = solve_separate(s, {}, 1e-3);
  EXPECT_FALSE(r.feasible);
  EXPECT_FALSE(r.diagnostics.empty());
}

TEST(Separate, HalfMillisecondFitsFiveMillisecondDeadline)
{
  const auto s = generate(with_deadline(default_config(), 5e-3), 1);
  const auto r = solve_separate(s, {}, 0.5e-3);
  ASSERT_TRUE(r.feasible) << (r.diagnostics.empty() ? "" : r.diagnostics.back());
  EXPECT_TRUE(check::verify(s, r.allocation).ok());
}

TEST(Separate, NeverCheaperThanJointAtOneMillisecond)
{
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto s = generate(default_config(), seed);
    const auto ja = solve_joint(s);
    const auto sa = solve_separate(s);
    if (!ja.feasible || !sa.feasible) continue;
    ++compared;
    EXPECT_GE(sa.cost, ja.cost * (1.0 - 1e-6)) << "seed " << seed;
  }
  EXPECT_GT(compared, 0);
}
