#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "support/fixtures.hpp"
#include "support/nfv_enumeration.hpp"
#include "tinfv/nfv.hpp"
#include "tinfv/rng.hpp"

using namespace tinfv;

namespace {

// `cells` BSs with one user each and a chain of `nfs` unit-coefficient NFs.
Scenario chain_scenario(std::size_t cells, std::size_t per_bs, std::size_t nfs, std::vector<double> rates = {1e9})
{
  auto c = fx::config(cells, per_bs, 1, 1);
  c.processing_rate = std::move(rates);
  c.services[0].chain.clear();
  for (std::size_t f = 0; f < nfs; ++f) c.services[0].chain.push_back(NfSpec{"nf" + std::to_string(f), {1.0}});
  return generate(c, 1);
}

// Event replay written from scratch: start = max(chain ready, server free).
std::vector<std::vector<double>> replay_oracle(const Scenario& s, const std::vector<Dispatch>& order)
{
  std::vector<std::vector<double>> end(s.num_users());
  std::vector<std::size_t> at(s.num_users());
  std::vector<double> free(s.num_bs(), 0.0);
  for (std::size_t u = 0; u < s.num_users(); ++u) at[u] = s.users[u].bs;
  for (const auto& d : order) {
    const double ready = (end[d.user].empty() ? 0.0 : end[d.user].back()) + nfvenum::hop(s, d.user, at[d.user], d.bs);
    const double e = std::max(ready, free[d.bs]) + nfvenum::proc(s, d.user, d.nf, d.bs);
    end[d.user].push_back(e);
    free[d.bs] = e;
    at[d.user] = d.bs;
  }
  return end;
}

// Random dispatch order honouring chain order.
std::vector<Dispatch> random_order(const Scenario& s, Rng& rng)
{
  std::vector<std::size_t> next(s.num_users(), 0);
  std::vector<Dispatch> out;
  std::size_t left = 0;
  for (std::size_t u = 0; u < s.num_users(); ++u) left += s.service_of(u).chain.size();
  while (left > 0) {
    const std::size_t u = rng.below(s.num_users());
    if (next[u] == s.service_of(u).chain.size()) continue;
    out.push_back({u, next[u]++, static_cast<std::size_t>(rng.below(s.num_bs()))});
    --left;
  }
  return out;
}

void expect_c9_and_exclusive(const Scenario& s, const NfvSchedule& sch)
{
  for (std::size_t u = 0; u < s.num_users(); ++u) {
    std::size_t prev_bs = s.users[u].bs;
    double prev_end = 0.0;
    for (std::size_t f = 0; f < s.service_of(u).chain.size(); ++f) {
      const auto& e = sch.execution(u, f);
      EXPECT_GE(e.start, prev_end + nfvenum::hop(s, u, prev_bs, e.bs) - 1e-18);
      EXPECT_GE(e.end, prev_end + nfvenum::proc(s, u, f, e.bs) + nfvenum::hop(s, u, prev_bs, e.bs) - 1e-18);
      prev_end = e.end;
      prev_bs = e.bs;
    }
  }
  for (std::size_t n = 0; n < s.num_bs(); ++n) {
    auto on = sch.timeline(n);
    for (std::size_t i = 1; i < on.size(); ++i)
      EXPECT_GE(sch.executions()[on[i]].start, sch.executions()[on[i - 1]].end);
  }
}

}  // namespace

TEST(NfProcessingTime, Examples)
{
  EXPECT_DOUBLE_EQ(nf_processing_time(1e6, 1.0, 1e9), 1e-3);
  EXPECT_EQ(nf_processing_time(0.0, 1.0, 1e9), 0.0);
  EXPECT_DOUBLE_EQ(nf_processing_time(1000.0, 2.0, 1e9), 2e-6);
  EXPECT_THROW(nf_processing_time(1.0, 1.0, 0.0), std::domain_error);
}

TEST(TransferTime, Examples)
{
  const std::vector<std::vector<double>> psi{{0.0, 1e9}, {1e9, 0.0}};
  EXPECT_EQ(transfer_time(1e6, 1, 1, psi), 0.0);
  EXPECT_DOUBLE_EQ(transfer_time(1e6, 0, 1, psi), 1e-3);
}

TEST(TransferTime, FullMeshMatchesFormula)
{
  Rng r(3);
  const std::size_t J = 5;
  std::vector<std::vector<double>> psi(J, std::vector<double>(J, 0.0));
  for (std::size_t a = 0; a < J; ++a)
    for (std::size_t b = a + 1; b < J; ++b) psi[a][b] = psi[b][a] = r.uniform(1e8, 1e10);
  for (std::size_t a = 0; a < J; ++a)
    for (std::size_t b = 0; b < J; ++b) EXPECT_EQ(transfer_time(777.0, a, b, psi), a == b ? 0.0 : 777.0 / psi[a][b]);
}

TEST(EndTime, FirstNfOnHomeBs)
{
  const auto s = chain_scenario(2, 1, 2);
  NfvSchedule sch(s);
  sch.dispatch(s, 0, 0, 0);
  EXPECT_DOUBLE_EQ(end_time(sch, 0, 0), 1.0 * 500.0 / 1e9);
}

TEST(EndTime, SecondNfOnOtherBs)
{
  const auto s = chain_scenario(2, 1, 2);
  NfvSchedule sch(s);
  sch.dispatch(s, 0, 0, 0);
  sch.dispatch(s, 0, 1, 1);
  EXPECT_DOUBLE_EQ(end_time(sch, 0, 1), end_time(sch, 0, 0) + 500.0 / 1e9 + 500.0 / 1e9);
}

TEST(EndTime, MatchesEventReplayOracle)
{
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = chain_scenario(2, 2, 2, {1e9, 1.7e9});
    s.users.resize(3);
    const auto order = random_order(s, rng);
    const auto sch = replay(s, order);
    const auto expect = replay_oracle(s, order);
    for (std::size_t u = 0; u < 3; ++u)
      for (std::size_t f = 0; f < 2; ++f) EXPECT_DOUBLE_EQ(end_time(sch, u, f), expect[u][f]);
    expect_c9_and_exclusive(s, sch);
  }
}

TEST(Dispatch, BrokenChainOrderThrows)
{
  const auto s = chain_scenario(2, 1, 2);
  NfvSchedule sch(s);
  EXPECT_THROW(sch.dispatch(s, 0, 1, 0), ScheduleError);
  sch.dispatch(s, 0, 0, 0);
  EXPECT_THROW(sch.dispatch(s, 0, 0, 1), ScheduleError);
}

TEST(Makespan, SingleNfAndEmpty)
{
  const auto s = chain_scenario(1, 1, 1);
  NfvSchedule sch(s);
  EXPECT_THROW(makespan(sch, 0), ScheduleError);
  sch.dispatch(s, 0, 0, 0);
  EXPECT_DOUBLE_EQ(makespan(sch, 0), end_time(sch, 0, 0));
}

TEST(Makespan, IsLastNfEndAndMaxOfChain)
{
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = chain_scenario(3, 2, 3, {1e9, 2e9, 0.5e9});
    const auto sch = replay(s, random_order(s, rng));
    for (std::size_t u = 0; u < s.num_users(); ++u) {
      double mx = 0.0;
      for (std::size_t f = 0; f < 3; ++f) mx = std::max(mx, end_time(sch, u, f));
      EXPECT_EQ(makespan(sch, u), mx);
      EXPECT_EQ(makespan(sch, u), end_time(sch, u, 2));
    }
  }
}

TEST(Heuristic, SingleUserPicksBestOfTwoBs)
{
  for (double psi : {1e9, 1e12}) {
    auto s = chain_scenario(2, 1, 1, {1e9, 2e9});
    s.users.resize(1);
    for (auto& row : s.backhaul) std::fill(row.begin(), row.end(), psi);
    const auto out = schedule_heuristic(s, {kInfeasible});
    ASSERT_TRUE(out.feasible());
    // Both options enumerated by hand.
    const double home = 500.0 / 1e9;
    const double away = 500.0 / psi + 500.0 / 2e9;
    const std::size_t want = away < home ? 1 : 0;
    EXPECT_EQ(out.schedule.execution(0, 0).bs, want) << "psi " << psi;
    EXPECT_DOUBLE_EQ(makespan(out.schedule, 0), std::min(home, away));
  }
}

TEST(Heuristic, InfiniteDeadlinesAlwaysFeasible)
{
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = generate(default_config(), seed);
    const auto out = schedule_heuristic(s, std::vector<double>(s.num_users(), kInfeasible));
    EXPECT_TRUE(out.feasible());
    for (std::size_t u = 0; u < s.num_users(); ++u) EXPECT_TRUE(out.schedule.complete(u));
    expect_c9_and_exclusive(s, out.schedule);
  }
}

TEST(Heuristic, SequentialServerOnOneBs)
{
  const auto s = chain_scenario(1, 2, 2);
  const auto out = schedule_heuristic(s, {1.0, 1.0});
  ASSERT_TRUE(out.feasible());
  const std::size_t first = out.order[0], second = out.order[1];
  EXPECT_GE(out.schedule.execution(second, 0).start, makespan(out.schedule, first));
}

TEST(Heuristic, AscendingDeadlineOrder)
{
  const auto s = chain_scenario(1, 3, 1);
  const auto out = schedule_heuristic(s, {3e-3, 1e-3, 2e-3});
  EXPECT_EQ(out.order, (std::vector<std::size_t>{1, 2, 0}));
}

TEST(Heuristic, ImpossibleDeadlineReported)
{
  const auto s = chain_scenario(1, 2, 2);
  const auto out = schedule_heuristic(s, {1e-12, 1e-12});
  EXPECT_FALSE(out.feasible());
  EXPECT_EQ(out.violators.size(), 2u);
}

TEST(Heuristic, TightUserServedFirst)
{
  const auto s = chain_scenario(1, 2, 1);
  const double p = 500.0 / 1e9;
  const auto out = schedule_heuristic(s, {1.5 * p, 1.5 * p});
  EXPECT_FALSE(out.feasible());  // only one of two equal jobs fits in 1.5 p
  EXPECT_EQ(out.violators.size(), 1u);
  const auto ok = schedule_heuristic(s, {2.5 * p, 1.0 * p});
  EXPECT_TRUE(ok.feasible());
  EXPECT_EQ(ok.order[0], 1u);
}

TEST(ExecCost, Examples)
{
  const auto s = chain_scenario(1, 1, 1);
  NfvSchedule sch(s);
  EXPECT_EQ(exec_cost(sch, s), 0.0);
  sch.dispatch(s, 0, 0, 0);
  EXPECT_DOUBLE_EQ(exec_cost(sch, s), 500.0 / 1e9);
}

TEST(ExecCost, RecountOnRandomSchedules)
{
  Rng rng(5);
  const auto s = generate(fx::config(3, 2, 1, 1), 4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sch = replay(s, random_order(s, rng));
    double expect = 0.0;
    for (const auto& e : sch.executions()) {
      const auto& svc = s.config.services[s.users[e.user].service];
      const auto& beta = svc.chain[e.nf].processing_coefficient_per_bs;
      expect += beta[std::min(e.bs, beta.size() - 1)] * svc.payload_bits / s.config.processing_rate[0];
    }
    EXPECT_NEAR(exec_cost(sch, s), expect, 1e-12 * expect);
    for (std::size_t u = 0; u < s.num_users(); ++u) {
      double own = 0.0;
      for (std::size_t f = 0; f < s.service_of(u).chain.size(); ++f) own += nf_processing_time(s, u, f, sch.execution(u, f).bs);
      EXPECT_LE(own, makespan(sch, u) * (1.0 + 1e-12));
    }
  }
}

TEST(Heuristic, NeverBeatsEnumeratedOptimum)
{
  int equal = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto c = default_config();
    c.num_sbs = 1 + seed % 2;
    c.users_per_bs_per_service = 1;
    auto s = generate(c, seed);
    s.users.resize(std::min<std::size_t>(s.num_users(), 3));
    Rng rng(seed);
    std::vector<double> deadlines(s.num_users());
    for (auto& d : deadlines) d = rng.uniform(1e-7, 1.5e-6);
    const auto out = schedule_heuristic(s, deadlines);
    if (!out.feasible()) continue;
    const auto best = nfvenum::optimum(s, deadlines);
    ASSERT_TRUE(best.feasible);
    const double h = exec_cost(out.schedule, s);
    EXPECT_GE(h, best.exec_cost * (1.0 - 1e-12)) << "seed " << seed;
    expect_c9_and_exclusive(s, out.schedule);
    ++total;
    equal += std::abs(h - best.exec_cost) <= 1e-12 * best.exec_cost;
  }
  EXPECT_GT(total, 10);
  EXPECT_GT(equal, 0);
}

TEST(Precedence, ChainAndServerEdges)
{
  const auto s = chain_scenario(1, 2, 2);
  const auto sch = replay(s, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}});
  const auto edges = sch.precedence();
  std::size_t chain = 0, server = 0;
  for (const auto& e : edges) (e.kind == Precedence::Kind::chain ? chain : server)++;
  EXPECT_EQ(chain, 2u);
  EXPECT_EQ(server, 3u);
}
