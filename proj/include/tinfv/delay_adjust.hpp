#pragma once

// Delay adjustment for fixed rates and makespans. Every delay constraint then
// collapses to a constant lower bound on one component, so the subproblem is
// solved by taking the bounds and handing the leftover budget back out.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "tinfv/qos_delay.hpp"
#include "tinfv/scenario.hpp"

namespace tinfv {

inline constexpr std::array<const char*, 5> kDelayComponents{"t_ul", "t_dl", "q_ul", "q_dl", "nfs"};

/// Per-component lower bounds for one user. Rates are in bit/s.
inline DelayBudget delay_lower_bounds(double payload_bits, double ul_rate_bps, double dl_rate_bps, bool has_dl,
                                      double makespan, const ScenarioConfig& cfg, double cap)
{
  DelayBudget b;
  b.t_ul = transmission_delay(payload_bits, ul_rate_bps);
  b.q_ul = min_q_delay_for_rate(cfg.violation_prob_ul, cfg.qos_exponent_ul, ul_rate_bps);
  if (has_dl) {
    b.t_dl = transmission_delay(payload_bits, dl_rate_bps);
    b.q_dl = min_q_delay_for_rate(cfg.violation_prob_dl, cfg.qos_exponent_dl, dl_rate_bps);
  }
  b.nfs = makespan;
  b.cap = cap;
  return b;
}

inline const char* dominant_component(const DelayBudget& b)
{
  const std::array<double, 5> v{b.t_ul, b.t_dl, b.q_ul, b.q_dl, b.nfs};
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return kDelayComponents[best];
}

/// Hands the slack of a feasible lower-bound budget to the radio components
/// in proportion to their bounds (evenly when all are zero); the NF component
/// stays at its bound. The result sums to the cap.
inline DelayBudget distribute_slack(const DelayBudget& lower)
{
  DelayBudget b = lower;
  const double slack = lower.cap - lower.total();
  if (!(slack > 0.0)) return b;
  const double radio = lower.radio();
  if (radio > 0.0) {
    const double f = slack / radio;
    b.t_ul += lower.t_ul * f;
    b.t_dl += lower.t_dl * f;
    b.q_ul += lower.q_ul * f;
    b.q_dl += lower.q_dl * f;
  } else {
    b.t_ul += slack / 4.0;
    b.t_dl += slack / 4.0;
    b.q_ul += slack / 4.0;
    b.q_dl += slack / 4.0;
  }
  return b;
}

struct DelayAdjustment {
  std::vector<DelayBudget> lower;    // per-component bounds
  std::vector<DelayBudget> budgets;  // bounds plus slack; equal to `lower` when infeasible
  std::vector<std::size_t> infeasible_users;
  std::vector<std::string> dominant;  // per user, set only when infeasible
  std::size_t constraints = 0;        // delay constraints evaluated
  bool feasible() const { return infeasible_users.empty(); }
};

/// ul_rates and dl_rates are spectral efficiencies (bit/s/Hz) per user; the
/// DL entry of an unpaired user is ignored.
inline DelayAdjustment adjust_delays(const Scenario& scn, const std::vector<double>& ul_rates,
                                     const std::vector<double>& dl_rates, const std::vector<double>& makespans)
{
  const std::size_t U = scn.num_users();
  if (ul_rates.size() != U || dl_rates.size() != U || makespans.size() != U)
    throw std::invalid_argument("adjust_delays: one rate and makespan per user required");
  DelayAdjustment out;
  out.lower.resize(U);
  out.budgets.resize(U);
  out.dominant.resize(U);
  for (std::size_t u = 0; u < U; ++u) {
    const bool has_dl = scn.users[u].teleoperator != npos;
    out.lower[u] = delay_lower_bounds(scn.payload(u), ul_rates[u] * scn.ul_bandwidth(), dl_rates[u] * scn.dl_bandwidth(),
                                      has_dl, makespans[u], scn.config, scn.deadline(u));
    out.constraints += 6;  // C6, C7, C8, C10, C11, C12
    if (out.lower[u].total() <= out.lower[u].cap) {
      out.budgets[u] = distribute_slack(out.lower[u]);
    } else {
      out.budgets[u] = out.lower[u];
      out.infeasible_users.push_back(u);
      out.dominant[u] = dominant_component(out.lower[u]);
    }
  }
  return out;
}

}  // namespace tinfv
