#pragma once

// VNF placement and scheduling on sequential BS servers: the end-time
// recurrence, makespans, execution cost and the deadline-ordered greedy
// placement heuristic.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "tinfv/qos_delay.hpp"
#include "tinfv/scenario.hpp"

namespace tinfv {

class ScheduleError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

inline double nf_processing_time(double payload_bits, double coefficient, double processing_rate)
{
  if (!(processing_rate > 0.0)) throw std::domain_error("nf_processing_time: processing rate must be > 0");
  if (!(coefficient > 0.0)) throw std::domain_error("nf_processing_time: coefficient must be > 0");
  return coefficient * payload_bits / processing_rate;
}

/// Backhaul transfer time between two BSs; zero when they coincide.
inline double transfer_time(double payload_bits, std::size_t from, std::size_t to,
                            const std::vector<std::vector<double>>& backhaul)
{
  if (from == to) return 0.0;
  const double cap = backhaul.at(from).at(to);
  if (!(cap > 0.0)) throw std::domain_error("transfer_time: backhaul capacity must be > 0");
  return payload_bits / cap;
}

inline double nf_processing_time(const Scenario& scn, std::size_t u, std::size_t f, std::size_t bs)
{
  return nf_processing_time(scn.payload(u), scn.service_of(u).chain.at(f).coefficient(bs), scn.bs.at(bs).processing_rate);
}

struct NfExecution {
  std::size_t user = 0;
  std::size_t nf = 0;
  std::size_t bs = 0;
  double start = 0.0;
  double end = 0.0;
  bool operator==(const NfExecution&) const = default;
};

/// One "runs after" fact of the placement relation A: NF `nf` of `user` runs
/// at `bs` after NF `pred_nf` of `pred_user` finished at `pred_bs`. Chain
/// edges link consecutive NFs of one user; server edges link consecutive
/// executions on one BS.
struct Precedence {
  enum class Kind { chain, server };
  Kind kind = Kind::chain;
  std::size_t user = 0, nf = 0, bs = 0;
  std::size_t pred_user = 0, pred_nf = 0, pred_bs = 0;
};

/// Executions in dispatch order. Each BS runs one NF at a time; an NF starts
/// once its chain predecessor has finished and its data has crossed the
/// backhaul, and once the server is free.
class NfvSchedule {
public:
  NfvSchedule() = default;

  explicit NfvSchedule(const Scenario& scn) : server_free_(scn.num_bs(), 0.0), slot_(scn.num_users())
  {
    for (std::size_t u = 0; u < scn.num_users(); ++u) slot_[u].assign(scn.service_of(u).chain.size(), npos);
  }

  /// Earliest end time of NF `f` of `u` if it were dispatched now at `bs`.
  double probe(const Scenario& scn, std::size_t u, std::size_t f, std::size_t bs) const
  {
    return ready_time(scn, u, f, bs) + nf_processing_time(scn, u, f, bs);
  }

  /// Appends NF `f` of `u` at `bs`. Throws ScheduleError when the chain
  /// order is broken (the predecessor is missing or the NF is already placed).
  const NfExecution& dispatch(const Scenario& scn, std::size_t u, std::size_t f, std::size_t bs)
  {
    if (u >= slot_.size() || f >= slot_[u].size() || bs >= server_free_.size())
      throw ScheduleError("dispatch: index out of range");
    if (slot_[u][f] != npos)
      throw ScheduleError("dispatch: NF " + std::to_string(f) + " of user " + std::to_string(u) + " placed twice");
    if (f > 0 && slot_[u][f - 1] == npos)
      throw ScheduleError("dispatch: NF " + std::to_string(f) + " of user " + std::to_string(u) +
                          " precedes its chain predecessor");
    NfExecution e;
    e.user = u;
    e.nf = f;
    e.bs = bs;
    e.start = ready_time(scn, u, f, bs);
    e.end = e.start + nf_processing_time(scn, u, f, bs);
    server_free_[bs] = e.end;
    slot_[u][f] = executions_.size();
    executions_.push_back(e);
    return executions_.back();
  }

  bool placed(std::size_t u, std::size_t f) const { return u < slot_.size() && f < slot_[u].size() && slot_[u][f] != npos; }

  bool complete(std::size_t u) const
  {
    if (u >= slot_.size() || slot_[u].empty()) return false;
    return std::all_of(slot_[u].begin(), slot_[u].end(), [](std::size_t s) { return s != npos; });
  }

  const NfExecution& execution(std::size_t u, std::size_t f) const
  {
    if (!placed(u, f)) throw ScheduleError("NF " + std::to_string(f) + " of user " + std::to_string(u) + " is not placed");
    return executions_[slot_[u][f]];
  }

  double end_time(std::size_t u, std::size_t f) const { return execution(u, f).end; }

  const std::vector<NfExecution>& executions() const { return executions_; }
  std::size_t num_users() const { return slot_.size(); }
  std::size_t chain_length(std::size_t u) const { return slot_.at(u).size(); }
  std::size_t num_bs() const { return server_free_.size(); }
  double server_free(std::size_t bs) const { return server_free_.at(bs); }

  /// Execution indices on `bs` in run order.
  std::vector<std::size_t> timeline(std::size_t bs) const
  {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < executions_.size(); ++i)
      if (executions_[i].bs == bs) out.push_back(i);
    return out;
  }

  std::vector<Precedence> precedence() const
  {
    std::vector<Precedence> out;
    std::vector<std::size_t> last_on(server_free_.size(), npos);
    for (const auto& e : executions_) {
      if (e.nf > 0) {
        const auto& p = executions_[slot_[e.user][e.nf - 1]];
        out.push_back({Precedence::Kind::chain, e.user, e.nf, e.bs, p.user, p.nf, p.bs});
      }
      if (last_on[e.bs] != npos) {
        const auto& p = executions_[last_on[e.bs]];
        out.push_back({Precedence::Kind::server, e.user, e.nf, e.bs, p.user, p.nf, p.bs});
      }
      last_on[e.bs] = slot_[e.user][e.nf];
    }
    return out;
  }

private:
  double ready_time(const Scenario& scn, std::size_t u, std::size_t f, std::size_t bs) const
  {
    const double c = scn.payload(u);
    double ready;
    if (f == 0) {
      ready = transfer_time(c, scn.users[u].bs, bs, scn.backhaul);
    } else {
      const auto& prev = executions_.at(slot_[u][f - 1]);
      ready = prev.end + transfer_time(c, prev.bs, bs, scn.backhaul);
    }
    return std::max(ready, server_free_[bs]);
  }

  std::vector<NfExecution> executions_;
  std::vector<double> server_free_;
  std::vector<std::vector<std::size_t>> slot_;
};

/// Rebuilds a schedule from an explicit dispatch order of (user, nf, bs).
struct Dispatch {
  std::size_t user, nf, bs;
};

inline NfvSchedule replay(const Scenario& scn, const std::vector<Dispatch>& order)
{
  NfvSchedule s(scn);
  for (const auto& d : order) s.dispatch(scn, d.user, d.nf, d.bs);
  return s;
}

/// End time of NF `f` of user `u`.
inline double end_time(const NfvSchedule& s, std::size_t u, std::size_t f) { return s.end_time(u, f); }

/// End time of the last NF of `u` (the lower bound on its NF delay).
inline double makespan(const NfvSchedule& s, std::size_t u)
{
  if (u >= s.num_users() || !s.complete(u))
    throw ScheduleError("makespan: user " + std::to_string(u) + " has an incomplete placement");
  return s.end_time(u, s.chain_length(u) - 1);
}

/// Sum of processing times over all placed NFs, in seconds.
inline double exec_cost(const NfvSchedule& s, const Scenario& scn)
{
  double total = 0.0;
  for (const auto& e : s.executions()) total += nf_processing_time(scn, e.user, e.nf, e.bs);
  return total;
}

enum class PlacementPolicy {
  whole_chain,  // every NF of a user on the one BS finishing its chain first
  per_nf,       // each NF on the BS finishing it first
};

struct NfvCounters {
  std::uint64_t precompute_ops = 0;
  std::uint64_t placement_ops = 0;
  std::uint64_t check_ops = 0;
  std::uint64_t total() const { return precompute_ops + placement_ops + check_ops; }
};

struct ScheduleOutcome {
  NfvSchedule schedule;
  std::vector<std::size_t> order;       // final user priority
  std::vector<std::size_t> violators;   // users whose makespan exceeds their deadline
  std::size_t reorders = 0;
  bool feasible() const { return violators.empty(); }
};

struct ScheduleOptions {
  PlacementPolicy policy = PlacementPolicy::whole_chain;
  double tolerance = 1e-12;  // relative slack allowed on a deadline
};

namespace detail {

inline NfvSchedule place_in_order(const Scenario& scn, const std::vector<std::size_t>& order, PlacementPolicy policy,
                                  NfvCounters* counters)
{
  NfvSchedule sched(scn);
  const std::size_t J = scn.num_bs();
  for (std::size_t u : order) {
    const std::size_t F = scn.service_of(u).chain.size();
    if (policy == PlacementPolicy::per_nf) {
      for (std::size_t f = 0; f < F; ++f) {
        std::size_t best = 0;
        double best_end = kInfeasible;
        for (std::size_t n = 0; n < J; ++n) {
          const double end = sched.probe(scn, u, f, n);
          if (counters) counters->placement_ops += 1 + sched.executions().size();
          if (end < best_end) best_end = end, best = n;
        }
        sched.dispatch(scn, u, f, best);
      }
      continue;
    }
    std::size_t best = 0;
    double best_end = kInfeasible;
    for (std::size_t n = 0; n < J; ++n) {
      // Chain kept contiguous on n: the server is held from the first NF on.
      double t = std::max(transfer_time(scn.payload(u), scn.users[u].bs, n, scn.backhaul), sched.server_free(n));
      for (std::size_t f = 0; f < F; ++f) {
        t += nf_processing_time(scn, u, f, n);
        if (counters) counters->placement_ops += 1 + sched.executions().size();
      }
      if (t < best_end) best_end = t, best = n;
    }
    for (std::size_t f = 0; f < F; ++f) sched.dispatch(scn, u, f, best);
  }
  return sched;
}

}  // namespace detail

/// Deadline-ordered greedy placement. Users are taken in ascending order of
/// their NF deadline (ties by BS then user id) and each is given the BS that
/// finishes its chain earliest. When a user misses its deadline it is swapped
/// with the earliest preceding user whose slack covers the deficit and the
/// placement is redone; each user may be moved at most U times.
inline ScheduleOutcome schedule_heuristic(const Scenario& scn, const std::vector<double>& deadlines,
                                          const ScheduleOptions& opts = {}, NfvCounters* counters = nullptr)
{
  const std::size_t U = scn.num_users();
  if (deadlines.size() != U) throw std::invalid_argument("schedule_heuristic: one deadline per user required");

  if (counters) {
    for (std::size_t u = 0; u < U; ++u)
      counters->precompute_ops += scn.service_of(u).chain.size() * scn.num_bs() + scn.num_bs();
  }

  ScheduleOutcome out;
  out.order.resize(U);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    if (deadlines[a] != deadlines[b]) return deadlines[a] < deadlines[b];
    if (scn.users[a].bs != scn.users[b].bs) return scn.users[a].bs < scn.users[b].bs;
    return a < b;
  });

  std::vector<std::size_t> moves(U, 0);
  for (;;) {
    out.schedule = detail::place_in_order(scn, out.order, opts.policy, counters);
    std::vector<double> slack(U);
    out.violators.clear();
    for (std::size_t pos = 0; pos < U; ++pos) {
      const std::size_t u = out.order[pos];
      slack[u] = deadlines[u] - makespan(out.schedule, u);
      if (counters) ++counters->check_ops;
      if (slack[u] < -opts.tolerance * std::max(1.0, std::abs(deadlines[u]))) out.violators.push_back(u);
    }
    if (out.violators.empty()) return out;

    bool moved = false;
    for (std::size_t v : out.violators) {
      if (moves[v] >= U) continue;
      const auto vpos = static_cast<std::size_t>(std::find(out.order.begin(), out.order.end(), v) - out.order.begin());
      const double deficit = -slack[v];
      for (std::size_t pos = 0; pos < vpos; ++pos) {
        const std::size_t w = out.order[pos];
        if (slack[w] > deficit) {
          std::swap(out.order[pos], out.order[vpos]);
          ++moves[v];
          ++out.reorders;
          moved = true;
          break;
        }
      }
      if (moved) break;
    }
    if (!moved) {
      std::sort(out.violators.begin(), out.violators.end());
      return out;
    }
  }
}

}  // namespace tinfv
