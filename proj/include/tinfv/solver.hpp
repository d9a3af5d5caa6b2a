#pragma once

// Joint radio + NFV resource allocation. The alternating loop cycles through
// subcarrier assignment, SCA power allocation, NFV placement and delay
// adjustment until the powers settle; the separate baseline pins the NF delay
// to a fixed carve-out and places the NFs afterwards.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tinfv/delay_adjust.hpp"
#include "tinfv/leg_split.hpp"
#include "tinfv/nfv.hpp"
#include "tinfv/qos_delay.hpp"
#include "tinfv/radio.hpp"
#include "tinfv/sca.hpp"
#include "tinfv/scenario.hpp"
#include "tinfv/subcarrier.hpp"
#include "tinfv/units.hpp"

namespace tinfv {

struct SolverSettings {
  double eps_threshold = 1e-4;  // W, on the stacked UL and DL power vectors
  int max_outer_iters = 100;
  int sca_max_iters = 50;
  double sca_tolerance = 1e-7;
  InitialPowerPolicy initial_power_policy = InitialPowerPolicy::target_sinr_point;
  PlacementPolicy placement = PlacementPolicy::whole_chain;
  double initial_queue_share = 0.01;  // of the radio budget, per queue

  std::vector<std::string> violations() const
  {
    std::vector<std::string> v;
    if (!(eps_threshold > 0.0)) v.push_back("eps_threshold: must be > 0");
    if (max_outer_iters < 1) v.push_back("max_outer_iters: must be >= 1");
    if (sca_max_iters < 1) v.push_back("sca_max_iters: must be >= 1");
    if (!(sca_tolerance > 0.0)) v.push_back("sca_tolerance: must be > 0");
    if (!(initial_queue_share > 0.0 && initial_queue_share < 0.5)) v.push_back("initial_queue_share: must lie in (0, 0.5)");
    return v;
  }

  void validate() const
  {
    auto v = violations();
    if (!v.empty()) throw ValidationError(std::move(v));
  }
};

struct Allocation {
  UlAllocation ul;
  DlAllocation dl;
  NfvSchedule nfv;
  std::vector<DelayBudget> delays;
};

struct SolverCounters {
  std::uint64_t subcarrier_ops = 0;
  std::uint64_t sca_iterations = 0;
  std::uint64_t nfv_ops = 0;
  std::uint64_t delay_constraints = 0;
};

struct RunResult {
  bool feasible = false;
  double cost = 0.0;
  double power_cost = 0.0;  // weighted power term
  double exec_cost = 0.0;   // weighted execution term
  std::vector<double> cost_trace;                // per outer iteration
  std::vector<std::vector<double>> sca_traces;   // per outer iteration, W
  ConstraintReport report;
  SolverCounters counters;
  int iterations = 0;
  double wall_ms = 0.0;
  Allocation allocation;
  std::vector<std::string> diagnostics;
};

inline double power_term(const Scenario& scn, const UlAllocation& ul, const DlAllocation& dl)
{
  return scn.config.cost_weight_power * (ul.total_power() + dl.total_power());
}

inline double exec_term(const Scenario& scn, const NfvSchedule& s)
{
  return scn.config.cost_weight_exec * seconds_to_ms(exec_cost(s, scn));
}

/// rho1 * (total UL + DL power in W) + rho2 * (execution time in ms).
inline double total_cost(const Scenario& scn, const Allocation& a)
{
  return power_term(scn, a.ul, a.dl) + exec_term(scn, a.nfv);
}

inline constexpr double kDelayTolerance = 1e-9;  // relative, on delay constraints

/// C1-C12 for a complete allocation.
inline ConstraintReport check_constraints(const Scenario& scn, const Allocation& a)
{
  ConstraintReport r = check_radio_constraints(scn, a.ul, a.dl);
  const std::size_t U = scn.num_users();
  const auto& cfg = scn.config;

  detail::CheckBuilder c5("C5", 0.0);
  for (std::size_t u = 0; u < U; ++u) {
    const bool ok = u < a.nfv.num_users() && a.nfv.complete(u);
    c5.observe(ok ? 0.0 : 1.0, "user " + std::to_string(u) + " chain not placed exactly once");
  }
  const bool placed = c5.done().passed;
  r.checks.push_back(c5.done());

  detail::CheckBuilder c6("C6", 0.0), c7("C7", 0.0), c8("C8", 0.0), c10("C10", 0.0), c11("C11", 0.0), c12("C12", 0.0);
  for (std::size_t u = 0; u < U; ++u) {
    const std::string who = "user " + std::to_string(u);
    if (u >= a.delays.size()) {
      c6.observe(1.0, who + " has no delay budget");
      continue;
    }
    const auto& d = a.delays[u];
    const double tol = kDelayTolerance * d.cap;
    c6.observe(d.total() - scn.deadline(u) - tol, who);
    const double r_ul = ul_rate(scn, a.ul, u) * scn.ul_bandwidth();
    c7.observe(transmission_delay(scn.payload(u), r_ul) - d.t_ul - tol, who);
    c11.observe(min_q_delay_for_rate(cfg.violation_prob_ul, cfg.qos_exponent_ul, r_ul) - d.q_ul - tol, who);
    if (scn.users[u].teleoperator != npos) {
      const double r_dl = paired_dl_rate(scn, a.dl, u) * scn.dl_bandwidth();
      c8.observe(transmission_delay(scn.payload(u), r_dl) - d.t_dl - tol, who);
      c12.observe(min_q_delay_for_rate(cfg.violation_prob_dl, cfg.qos_exponent_dl, r_dl) - d.q_dl - tol, who);
    }
    if (placed) c10.observe(makespan(a.nfv, u) - d.nfs - tol, who);
  }
  r.checks.push_back(c6.done());
  r.checks.push_back(c7.done());
  r.checks.push_back(c8.done());

  detail::CheckBuilder c9("C9", 0.0);
  for (const auto& e : a.nfv.executions()) {
    const double tol = kDelayTolerance * std::max(e.end, 1e-12);
    if (e.nf > 0) {
      const auto& p = a.nfv.execution(e.user, e.nf - 1);
      const double need = p.end + nf_processing_time(scn, e.user, e.nf, e.bs) +
                          transfer_time(scn.payload(e.user), p.bs, e.bs, scn.backhaul);
      c9.observe(need - e.end - tol, "user " + std::to_string(e.user) + " nf " + std::to_string(e.nf));
    }
  }
  for (const auto& pr : a.nfv.precedence()) {
    if (pr.kind != Precedence::Kind::server) continue;
    const auto& e = a.nfv.execution(pr.user, pr.nf);
    const auto& p = a.nfv.execution(pr.pred_user, pr.pred_nf);
    const double need = p.end + nf_processing_time(scn, e.user, e.nf, e.bs);
    c9.observe(need - e.end - kDelayTolerance * std::max(e.end, 1e-12),
               "bs " + std::to_string(e.bs) + " overlap at user " + std::to_string(e.user));
  }
  r.checks.push_back(c9.done());
  r.checks.push_back(c10.done());
  r.checks.push_back(c11.done());
  r.checks.push_back(c12.done());
  return r;
}

/// Starting delay split of a radio budget D^max - nfs: each queue gets a small
/// share and the transmission delays share the rest at the interference-free
/// minimum of the UL plus DL power. When that split cannot meet a power cap,
/// both links get the same spectral efficiency per subcarrier instead.
inline std::vector<DelayBudget> initial_budgets(const Scenario& scn, const UlAllocation& ul, const DlAllocation& dl,
                                                const std::vector<double>& nfs, double queue_share)
{
  std::vector<DelayBudget> out(scn.num_users());
  for (std::size_t u = 0; u < scn.num_users(); ++u) {
    auto& b = out[u];
    b.cap = scn.deadline(u);
    b.nfs = nfs[u];
    const double radio = b.cap - b.nfs;
    if (!(radio > 0.0)) continue;
    const std::size_t o = scn.users[u].teleoperator;
    const double w_ul = 1.0 / (scn.ul_bandwidth() * static_cast<double>(std::max<std::size_t>(ul.count(u), 1)));
    if (o == npos) {
      b.q_ul = queue_share * radio;
      b.t_ul = radio - b.q_ul;
      continue;
    }
    const double w_dl = 1.0 / (scn.dl_bandwidth() * static_cast<double>(std::max<std::size_t>(dl.count(o), 1)));
    b.q_ul = b.q_dl = queue_share * radio;
    const double t = radio - b.q_ul - b.q_dl;
    b.t_ul = t * w_ul / (w_ul + w_dl);
    b.t_dl = t - b.t_ul;

    const std::size_t j = scn.users[u].bs, m = scn.teleoperators[o].bs;
    leg_split::Leg lu, ld;
    lu.demand = ld.demand = scn.payload(u);
    lu.bandwidth = scn.ul_bandwidth();
    ld.bandwidth = scn.dl_bandwidth();
    lu.cap = scn.users[u].max_power;
    ld.cap = scn.bs[m].max_power;
    for (std::size_t k = 0; k < ul.cols; ++k)
      if (ul.assigned(u, k)) lu.a.push_back(scn.gain_ul(u, j, k) / scn.noise_ul);
    for (std::size_t l = 0; l < dl.cols; ++l)
      if (dl.assigned(o, l)) ld.a.push_back(scn.gain_dl(o, m, l) / scn.noise_dl);
    const auto split = leg_split::best_split(lu, ld, t);
    if (split.feasible) b.t_ul = split.t_ul, b.t_dl = t - split.t_ul;
  }
  return out;
}

namespace detail {

inline double distance2(const std::vector<double>& a, const std::vector<double>& b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Users implicated by a power-step infeasibility label.
inline std::vector<std::size_t> users_of_binding(const Scenario& scn, const std::string& label)
{
  std::vector<std::size_t> out;
  const auto sp = label.find_last_of(' ');
  if (sp == std::string::npos) return out;
  std::size_t idx = 0;
  try {
    idx = std::stoul(label.substr(sp + 1));
  } catch (...) {
    return out;
  }
  if (label.rfind("C7/C11 row", 0) == 0 || label.rfind("C3 user", 0) == 0) {
    if (idx < scn.num_users()) out.push_back(idx);
  } else if (label.rfind("C8/C12 row", 0) == 0) {
    if (idx < scn.num_teleoperators() && scn.teleoperators[idx].user != npos) out.push_back(scn.teleoperators[idx].user);
  } else if (label.rfind("C4 bs", 0) == 0) {
    for (std::size_t o : scn.teleoperators_at(idx))
      if (scn.teleoperators[o].user != npos) out.push_back(scn.teleoperators[o].user);
  }
  return out;
}

// The alternating loop. With `fixed_nfs` set, the NF delay of every user is
// pinned and no placement happens inside the loop.
inline RunResult run_alternating(const Scenario& scn, const SolverSettings& st, std::optional<double> fixed_nfs)
{
  st.validate();
  RunResult res;
  const std::size_t U = scn.num_users();

  ScaSettings sca;
  sca.max_iters = st.sca_max_iters;
  sca.tolerance = st.sca_tolerance;
  sca.initial_power_policy = st.initial_power_policy;

  ScheduleOptions nfv_opts;
  nfv_opts.policy = st.placement;

  auto schedule = [&](const std::vector<double>& deadlines) {
    NfvCounters c;
    auto out = schedule_heuristic(scn, deadlines, nfv_opts, &c);
    res.counters.nfv_ops += c.total();
    return out;
  };

  std::vector<double> nfs(U);
  std::optional<NfvSchedule> sched;
  if (fixed_nfs) {
    std::fill(nfs.begin(), nfs.end(), *fixed_nfs);
  } else {
    std::vector<double> deadlines(U);
    for (std::size_t u = 0; u < U; ++u) deadlines[u] = scn.deadline(u);
    sched = schedule(deadlines).schedule;
    for (std::size_t u = 0; u < U; ++u) nfs[u] = makespan(*sched, u);
  }

  std::vector<DelayBudget> budgets(U);
  for (std::size_t u = 0; u < U; ++u) budgets[u].nfs = nfs[u], budgets[u].cap = scn.deadline(u);

  UlAllocation cur_ul = empty_ul(scn);
  DlAllocation cur_dl = empty_dl(scn);
  std::optional<Allocation> best;
  double best_cost = kInfeasible;
  std::vector<std::size_t> forced;
  bool retriggered = false;

  for (int z = 1; z <= st.max_outer_iters; ++z) {
    res.iterations = z;
    SubcarrierCounters sc_counters;
    auto sc = allocate_subcarriers(scn, cur_ul, cur_dl, budgets, forced, &sc_counters);
    res.counters.subcarrier_ops += sc_counters.ops;
    forced.clear();
    if (z == 1) {
      budgets = initial_budgets(scn, sc.ul, sc.dl, nfs, st.initial_queue_share);
      // The starting point of the power iterate sequence.
      cur_ul = sc.ul;
      cur_dl = sc.dl;
    }

    auto pw = allocate_power_sca(scn, sc.ul, sc.dl, budgets, sca, &sc.ul, &sc.dl);
    res.counters.sca_iterations += static_cast<std::uint64_t>(pw.sca_iterations());
    res.sca_traces.push_back(pw.trace);
    if (!pw.feasible) {
      res.diagnostics.push_back("iteration " + std::to_string(z) + ": power step infeasible at " + pw.binding);
      res.cost_trace.push_back(best ? best_cost : 0.0);
      if (retriggered) break;
      retriggered = true;
      forced = users_of_binding(scn, pw.binding);
      continue;
    }

    std::vector<double> r_ul(U, 0.0), r_dl(U, 0.0);
    for (std::size_t u = 0; u < U; ++u) {
      r_ul[u] = ul_rate(scn, pw.ul, u);
      r_dl[u] = paired_dl_rate(scn, pw.dl, u);
    }

    std::vector<double> makespans(U);
    if (fixed_nfs) {
      makespans = nfs;
    } else {
      // C6 mode: each user's NF deadline is what the radio leaves over.
      std::vector<double> deadlines(U);
      for (std::size_t u = 0; u < U; ++u) {
        const auto lb = delay_lower_bounds(scn.payload(u), r_ul[u] * scn.ul_bandwidth(), r_dl[u] * scn.dl_bandwidth(),
                                           scn.users[u].teleoperator != npos, 0.0, scn.config, scn.deadline(u));
        deadlines[u] = scn.deadline(u) - lb.radio();
      }
      sched = schedule(deadlines).schedule;
      for (std::size_t u = 0; u < U; ++u) makespans[u] = makespan(*sched, u);
    }

    auto adj = adjust_delays(scn, r_ul, r_dl, makespans);
    res.counters.delay_constraints += adj.constraints;

    Allocation alloc;
    alloc.ul = pw.ul;
    alloc.dl = pw.dl;
    if (sched) alloc.nfv = *sched;
    alloc.delays = adj.budgets;
    const double cost = power_term(scn, alloc.ul, alloc.dl) + (sched ? exec_term(scn, alloc.nfv) : 0.0);
    res.cost_trace.push_back(cost);

    if (adj.feasible()) {
      budgets = adj.budgets;
      retriggered = false;
      if (cost < best_cost) best_cost = cost, best = std::move(alloc);
    } else {
      for (std::size_t u : adj.infeasible_users) {
        res.diagnostics.push_back("iteration " + std::to_string(z) + ": user " + std::to_string(u) +
                                  " over its deadline via " + adj.dominant[u]);
        adj.budgets[u] = budgets[u];
      }
      for (std::size_t u = 0; u < U; ++u) budgets[u] = adj.budgets[u];
      forced = adj.infeasible_users;
    }

    const bool settled = distance2(pw.ul.power, cur_ul.power) <= st.eps_threshold &&
                         distance2(pw.dl.power, cur_dl.power) <= st.eps_threshold;
    cur_ul = pw.ul;
    cur_dl = pw.dl;
    if (settled && (adj.feasible() || retriggered)) break;
    if (!adj.feasible()) retriggered = true;
  }

  if (best) {
    res.allocation = std::move(*best);
    res.feasible = true;
  } else {
    res.allocation.ul = cur_ul;
    res.allocation.dl = cur_dl;
    if (sched) res.allocation.nfv = *sched;
    res.allocation.delays = budgets;
    res.diagnostics.push_back("no feasible allocation found");
  }
  return res;
}

inline void finish(const Scenario& scn, RunResult& res)
{
  res.power_cost = power_term(scn, res.allocation.ul, res.allocation.dl);
  res.exec_cost = exec_term(scn, res.allocation.nfv);
  res.cost = res.power_cost + res.exec_cost;
  res.report = check_constraints(scn, res.allocation);
  if (res.feasible && !res.report.all_passed()) {
    res.feasible = false;
    for (const auto& c : res.report.checks)
      if (!c.passed) res.diagnostics.push_back(c.name + " violated: " + c.detail);
  }
}

}  // namespace detail

/// Joint approach.
inline RunResult solve_joint(const Scenario& scn, const SolverSettings& st = {})
{
  const auto t0 = std::chrono::steady_clock::now();
  auto res = detail::run_alternating(scn, st, std::nullopt);
  detail::finish(scn, res);
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline constexpr double kDefaultNfvCarveOut = 0.5e-3;  // s

/// Separate approach: radio allocation with the NF delay pinned to
/// `fixed_nfv_delay`, then NF placement against that same deadline.
inline RunResult solve_separate(const Scenario& scn, const SolverSettings& st = {},
                                double fixed_nfv_delay = kDefaultNfvCarveOut)
{
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  double min_deadline = kInfeasible;
  for (std::size_t u = 0; u < scn.num_users(); ++u) min_deadline = std::min(min_deadline, scn.deadline(u));
  if (!(fixed_nfv_delay > 0.0) || !(fixed_nfv_delay < min_deadline)) {
    st.validate();
    res.diagnostics.push_back("NF delay carve-out must lie in (0, min deadline)");
    res.allocation.ul = empty_ul(scn);
    res.allocation.dl = empty_dl(scn);
    res.allocation.nfv = NfvSchedule(scn);
    detail::finish(scn, res);
    res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

  res = detail::run_alternating(scn, st, fixed_nfv_delay);

  std::vector<double> deadlines(scn.num_users(), fixed_nfv_delay);
  NfvCounters c;
  auto out = schedule_heuristic(scn, deadlines, ScheduleOptions{st.placement}, &c);
  res.counters.nfv_ops += c.total();
  res.allocation.nfv = out.schedule;
  if (!out.feasible()) {
    res.feasible = false;
    for (std::size_t u : out.violators)
      res.diagnostics.push_back("user " + std::to_string(u) + ": NF makespan exceeds the carve-out");
  }
  detail::finish(scn, res);
  for (auto& c : res.cost_trace) c += res.exec_cost;
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace tinfv
