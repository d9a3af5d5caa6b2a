#pragma once

// Exhaustive reference for tiny instances. Every subcarrier assignment and
// every per-NF placement is enumerated; for each candidate the radio power
// is the interference-free minimum under the best split of the delay budget
// between the UL and DL legs, and the NF delay is the chain end time on idle
// servers. Both simplifications can only lower the cost, so the result is a
// lower bound on any allocation the solver can return.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "tinfv/leg_split.hpp"
#include "tinfv/nfv.hpp"
#include "tinfv/qos_delay.hpp"
#include "tinfv/sca.hpp"
#include "tinfv/scenario.hpp"
#include "tinfv/solver.hpp"
#include "tinfv/units.hpp"

namespace tinfv {

inline constexpr std::uint64_t kOracleCandidateLimit = 1'000'000;

struct OracleSolution {
  bool feasible = false;
  double cost = kInfeasible;
  double power_cost = 0.0;
  double exec_cost = 0.0;
  std::vector<std::size_t> ul_owner;               // per (bs, ul subcarrier), row-major; npos if idle
  std::vector<std::size_t> dl_owner;               // per (bs, dl subcarrier)
  std::vector<std::vector<std::size_t>> placement;  // per user, per NF
  std::vector<double> ul_power;                    // per user, W
  std::vector<double> dl_power;                    // per user (its teleoperator), W
  std::vector<DelayBudget> delays;
  std::uint64_t candidates = 0;
};

struct OracleReport {
  OracleSolution oracle;
  RunResult heuristic;
  bool heuristic_passes_checker = false;
  double gap() const { return oracle.feasible && oracle.cost > 0.0 ? heuristic.cost / oracle.cost : kInfeasible; }
};

/// Two BSs, one user each, two UL and two DL subcarriers.
inline ScenarioConfig tiny_config()
{
  ScenarioConfig c = default_config();
  c.num_sbs = 1;
  c.ul_bandwidth = 2 * c.ul_subcarrier_bandwidth();
  c.dl_bandwidth = 2 * c.dl_subcarrier_bandwidth();
  c.num_ul_subcarriers = 2;
  c.num_dl_subcarriers = 2;
  c.users_per_bs_per_service = 1;
  return c;
}

namespace oracle_detail {

// Chain end time of `u` with every server idle.
inline double idle_makespan(const Scenario& scn, std::size_t u, const std::vector<std::size_t>& where)
{
  double t = 0.0;
  std::size_t at = scn.users[u].bs;
  for (std::size_t f = 0; f < where.size(); ++f) {
    t += transfer_time(scn.payload(u), at, where[f], scn.backhaul) + nf_processing_time(scn, u, f, where[f]);
    at = where[f];
  }
  return t;
}

// Mixed-radix counter over `radix`; false once it wraps.
inline bool advance(std::vector<std::size_t>& digit, const std::vector<std::size_t>& radix)
{
  for (std::size_t i = 0; i < digit.size(); ++i) {
    if (++digit[i] < radix[i]) return true;
    digit[i] = 0;
  }
  return false;
}

}  // namespace oracle_detail

/// Enumerates the instance. Throws std::invalid_argument when the candidate
/// count exceeds kOracleCandidateLimit.
inline OracleSolution solve_oracle(const Scenario& scn)
{
  using namespace oracle_detail;
  using leg_split::Leg;
  using leg_split::best_split;
  const std::size_t J = scn.num_bs(), U = scn.num_users(), K = scn.num_ul(), L = scn.num_dl();
  const auto& cfg = scn.config;

  // Digit layout: UL owners per (bs, k), DL owners per (bs, l), then BS per (user, nf).
  std::vector<std::vector<std::size_t>> ul_cell(J), dl_cell(J);
  for (std::size_t j = 0; j < J; ++j) ul_cell[j] = scn.users_at(j), dl_cell[j] = scn.teleoperators_at(j);
  std::vector<std::size_t> radix;
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t k = 0; k < K; ++k) radix.push_back(std::max<std::size_t>(ul_cell[j].size(), 1));
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t l = 0; l < L; ++l) radix.push_back(std::max<std::size_t>(dl_cell[j].size(), 1));
  const std::size_t place_from = radix.size();
  for (std::size_t u = 0; u < U; ++u)
    for (std::size_t f = 0; f < scn.service_of(u).chain.size(); ++f) radix.push_back(J);

  double count = 1.0;
  for (std::size_t r : radix) count *= static_cast<double>(r);
  if (count > static_cast<double>(kOracleCandidateLimit))
    throw std::invalid_argument("oracle: " + std::to_string(count) + " candidates exceed the enumeration limit");

  const double ul_q = std::log(1.0 / cfg.violation_prob_ul) / std::expm1(cfg.qos_exponent_ul);
  const double dl_q = std::log(1.0 / cfg.violation_prob_dl) / std::expm1(cfg.qos_exponent_dl);

  OracleSolution best;
  std::vector<std::size_t> digit(radix.size(), 0);
  do {
    ++best.candidates;
    OracleSolution cand;
    cand.ul_owner.assign(J * K, npos);
    cand.dl_owner.assign(J * L, npos);
    std::size_t d = 0;
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t k = 0; k < K; ++k, ++d)
        if (!ul_cell[j].empty()) cand.ul_owner[j * K + k] = ul_cell[j][digit[d]];
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t l = 0; l < L; ++l, ++d)
        if (!dl_cell[j].empty()) cand.dl_owner[j * L + l] = dl_cell[j][digit[d]];
    cand.placement.resize(U);
    d = place_from;
    for (std::size_t u = 0; u < U; ++u)
      for (std::size_t f = 0; f < scn.service_of(u).chain.size(); ++f) cand.placement[u].push_back(digit[d++]);

    cand.feasible = true;
    cand.ul_power.assign(U, 0.0);
    cand.dl_power.assign(U, 0.0);
    cand.delays.resize(U);
    double exec_s = 0.0;
    std::vector<double> bs_dl(J, 0.0);
    for (std::size_t u = 0; u < U && cand.feasible; ++u) {
      const std::size_t j = scn.users[u].bs;
      for (std::size_t f = 0; f < cand.placement[u].size(); ++f) exec_s += nf_processing_time(scn, u, f, cand.placement[u][f]);
      Leg ul, dl;
      ul.demand = scn.payload(u) + ul_q;
      ul.bandwidth = scn.ul_bandwidth();
      ul.cap = scn.users[u].max_power;
      for (std::size_t k = 0; k < K; ++k)
        if (cand.ul_owner[j * K + k] == u) ul.a.push_back(scn.gain_ul(u, j, k) / scn.noise_ul);
      const std::size_t o = scn.users[u].teleoperator;
      std::size_t m = npos;
      if (o != npos) {
        m = scn.teleoperators[o].bs;
        dl.demand = scn.payload(u) + dl_q;
        dl.bandwidth = scn.dl_bandwidth();
        dl.cap = scn.bs[m].max_power;
        for (std::size_t l = 0; l < L; ++l)
          if (cand.dl_owner[m * L + l] == o) dl.a.push_back(scn.gain_dl(o, m, l) / scn.noise_dl);
      }
      auto& b = cand.delays[u];
      b.cap = scn.deadline(u);
      b.nfs = idle_makespan(scn, u, cand.placement[u]);
      const auto split = best_split(ul, dl, b.cap - b.nfs);
      if (!split.feasible) {
        cand.feasible = false;
        break;
      }
      b.t_ul = scn.payload(u) / ul.demand * split.t_ul;
      b.q_ul = split.t_ul - b.t_ul;
      if (dl.active()) {
        b.t_dl = scn.payload(u) / dl.demand * split.t_dl;
        b.q_dl = split.t_dl - b.t_dl;
        bs_dl[m] += split.p_dl;
      }
      cand.ul_power[u] = split.p_ul;
      cand.dl_power[u] = split.p_dl;
    }
    for (std::size_t j = 0; j < J && cand.feasible; ++j)
      if (bs_dl[j] > scn.bs[j].max_power) cand.feasible = false;
    if (!cand.feasible) continue;

    double watts = 0.0;
    for (std::size_t u = 0; u < U; ++u) watts += cand.ul_power[u] + cand.dl_power[u];
    cand.power_cost = cfg.cost_weight_power * watts;
    cand.exec_cost = cfg.cost_weight_exec * seconds_to_ms(exec_s);
    cand.cost = cand.power_cost + cand.exec_cost;
    if (cand.cost < best.cost) {
      cand.candidates = best.candidates;
      best = std::move(cand);
    }
  } while (advance(digit, radix));
  return best;
}

/// Oracle lower bound next to the joint solver's result on the same instance.
inline OracleReport run_oracle_comparison(const Scenario& scn, const SolverSettings& st = {})
{
  OracleReport r;
  r.oracle = solve_oracle(scn);
  r.heuristic = solve_joint(scn, st);
  r.heuristic_passes_checker = r.heuristic.report.all_passed();
  return r;
}

inline OracleReport run_oracle_comparison(const ScenarioConfig& cfg, std::uint64_t seed, const SolverSettings& st = {})
{
  return run_oracle_comparison(generate(cfg, seed), st);
}

}  // namespace tinfv
