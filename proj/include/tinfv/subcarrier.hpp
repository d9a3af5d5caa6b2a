#pragma once

// Deadline-priority subcarrier assignment. Within each cell, users (and
// teleoperators) take turns in ascending order of their deadline, each
// claiming its best free subcarrier by current power times gain, until every
// subcarrier is taken. Users that cannot meet their delay budget even at full
// power are moved ahead of a user with enough slack, and the round is redone.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "tinfv/delay_adjust.hpp"
#include "tinfv/qos_delay.hpp"
#include "tinfv/radio.hpp"
#include "tinfv/scenario.hpp"

namespace tinfv {

struct SubcarrierCounters {
  std::uint64_t ops = 0;  // claims scanned + capability checks + reorder scans
};

struct SubcarrierResult {
  UlAllocation ul;
  DlAllocation dl;
  std::vector<std::size_t> violators;  // users short of their deadline under the final order
  std::size_t reorders = 0;
  bool feasible() const { return violators.empty(); }
};

namespace detail {

// Per-entry probe power: the entry's own power when assigned and positive,
// otherwise the row's mean assigned power, otherwise `fallback`.
template <class Alloc>
std::vector<double> probe_levels(const Alloc& prev, std::size_t rows, std::size_t cols,
                                 const std::vector<double>& fallback)
{
  std::vector<double> level(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    std::size_t n = 0;
    if (prev.rows == rows && prev.cols == cols)
      for (std::size_t k = 0; k < cols; ++k)
        if (prev.assigned(i, k) && prev.p(i, k) > 0.0) sum += prev.p(i, k), ++n;
    const double mean = n > 0 ? sum / static_cast<double>(n) : fallback[i];
    for (std::size_t k = 0; k < cols; ++k) {
      const bool own = prev.rows == rows && prev.cols == cols && prev.assigned(i, k) && prev.p(i, k) > 0.0;
      level[i * cols + k] = own ? prev.p(i, k) : mean;
    }
  }
  return level;
}

// Round-robin claims within one cell. `order` lists the cell's rows by
// priority; `gain(i, k)` is the row's own gain.
template <class Gain>
void claim_round_robin(const std::vector<std::size_t>& order, std::size_t cols, const std::vector<double>& level,
                       Gain gain, std::vector<std::uint8_t>& assign, SubcarrierCounters* counters)
{
  if (order.empty()) return;
  std::vector<std::uint8_t> taken(cols, 0);
  std::size_t left = cols;
  for (std::size_t turn = 0; left > 0; turn = (turn + 1) % order.size()) {
    const std::size_t i = order[turn];
    std::size_t best = cols;
    double best_v = -1.0;
    for (std::size_t k = 0; k < cols; ++k) {
      if (counters) ++counters->ops;
      if (taken[k]) continue;
      const double v = level[i * cols + k] * gain(i, k);
      if (v > best_v) best_v = v, best = k;
    }
    taken[best] = 1;
    assign[i * cols + best] = 1;
    --left;
  }
}

template <class Alloc>
void fill_probe_power(Alloc& a, const std::vector<double>& level)
{
  for (std::size_t idx = 0; idx < a.power.size(); ++idx) a.power[idx] = a.assign[idx] ? level[idx] : 0.0;
}

}  // namespace detail

/// Assigns UL and DL subcarriers. `prev_ul` / `prev_dl` carry the current
/// power iterate (empty allocations select half of each budget spread evenly);
/// `budgets` supplies each user's current NF-delay share. Returned
/// allocations carry probe powers on assigned entries.
inline SubcarrierResult allocate_subcarriers(const Scenario& scn, const UlAllocation& prev_ul, const DlAllocation& prev_dl,
                                             const std::vector<DelayBudget>& budgets,
                                             const std::vector<std::size_t>& forced_violators = {},
                                             SubcarrierCounters* counters = nullptr)
{
  const std::size_t U = scn.num_users(), O = scn.num_teleoperators(), J = scn.num_bs();
  const std::size_t K = scn.num_ul(), L = scn.num_dl();

  std::vector<double> ul_fallback(U), dl_fallback(O);
  for (std::size_t u = 0; u < U; ++u) ul_fallback[u] = 0.5 * scn.users[u].max_power / static_cast<double>(K);
  for (std::size_t o = 0; o < O; ++o)
    dl_fallback[o] = 0.5 * scn.bs[scn.teleoperators[o].bs].max_power / static_cast<double>(L);
  const auto ul_level = detail::probe_levels(prev_ul, U, K, ul_fallback);
  const auto dl_level = detail::probe_levels(prev_dl, O, L, dl_fallback);

  auto paired_deadline = [&](std::size_t o) {
    const std::size_t u = scn.teleoperators[o].user;
    return u == npos ? kInfeasible : scn.deadline(u);
  };

  // Priority orders per cell.
  std::vector<std::vector<std::size_t>> ul_order(J), dl_order(J);
  for (std::size_t j = 0; j < J; ++j) {
    ul_order[j] = scn.users_at(j);
    std::stable_sort(ul_order[j].begin(), ul_order[j].end(), [&](std::size_t a, std::size_t b) {
      return scn.deadline(a) != scn.deadline(b) ? scn.deadline(a) < scn.deadline(b) : a < b;
    });
    dl_order[j] = scn.teleoperators_at(j);
    std::stable_sort(dl_order[j].begin(), dl_order[j].end(), [&](std::size_t a, std::size_t b) {
      return paired_deadline(a) != paired_deadline(b) ? paired_deadline(a) < paired_deadline(b) : a < b;
    });
  }

  SubcarrierResult out;
  std::vector<std::size_t> moves(U, 0);
  std::vector<std::size_t> forced = forced_violators;

  for (;;) {
    out.ul = empty_ul(scn);
    out.dl = empty_dl(scn);
    for (std::size_t j = 0; j < J; ++j) {
      detail::claim_round_robin(ul_order[j], K, ul_level,
                                [&](std::size_t u, std::size_t k) { return scn.gain_ul(u, j, k); }, out.ul.assign,
                                counters);
      detail::claim_round_robin(dl_order[j], L, dl_level,
                                [&](std::size_t o, std::size_t l) { return scn.gain_dl(o, j, l); }, out.dl.assign,
                                counters);
    }
    detail::fill_probe_power(out.ul, ul_level);
    detail::fill_probe_power(out.dl, dl_level);

    // Capability check: each budget spread evenly over its assigned entries,
    // interference at the probe powers.
    std::vector<double> dl_share(J, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      std::size_t n = 0;
      for (std::size_t o : scn.teleoperators_at(j)) n += out.dl.count(o);
      dl_share[j] = n > 0 ? scn.bs[j].max_power / static_cast<double>(n) : 0.0;
    }
    std::vector<double> residual(U, 0.0);
    out.violators.clear();
    for (std::size_t u = 0; u < U; ++u) {
      if (counters) counters->ops += 4;
      const std::size_t j = scn.users[u].bs;
      const std::size_t n = out.ul.count(u);
      double r_ul = 0.0;
      for (std::size_t k = 0; k < K; ++k)
        if (out.ul.assigned(u, k)) {
          const double p = scn.users[u].max_power / static_cast<double>(n);
          r_ul += std::log2(1.0 + p * scn.gain_ul(u, j, k) / (scn.noise_ul + ul_interference(scn, out.ul, u, k)));
        }
      const std::size_t o = scn.users[u].teleoperator;
      double r_dl = 0.0;
      if (o != npos) {
        const std::size_t m = scn.teleoperators[o].bs;
        for (std::size_t l = 0; l < L; ++l)
          if (out.dl.assigned(o, l))
            r_dl += std::log2(1.0 + dl_share[m] * scn.gain_dl(o, m, l) / (scn.noise_dl + dl_interference(scn, out.dl, o, l)));
      }
      const double nfs = u < budgets.size() ? budgets[u].nfs : 0.0;
      const auto lb = delay_lower_bounds(scn.payload(u), r_ul * scn.ul_bandwidth(), r_dl * scn.dl_bandwidth(), o != npos,
                                         nfs, scn.config, scn.deadline(u));
      residual[u] = lb.cap - lb.total();
      if (!(residual[u] >= 0.0)) out.violators.push_back(u);
    }
    auto to_move = out.violators;
    for (std::size_t u : forced)
      if (std::find(to_move.begin(), to_move.end(), u) == to_move.end()) to_move.push_back(u);
    if (to_move.empty()) return out;

    bool moved = false;
    for (std::size_t v : to_move) {
      if (moves[v] >= U) continue;
      const double deficit = std::isfinite(residual[v]) ? std::max(-residual[v], 0.0) : kInfeasible;
      auto promote = [&](std::vector<std::size_t>& order, std::size_t row, auto owner) {
        auto it = std::find(order.begin(), order.end(), row);
        const auto pos = static_cast<std::size_t>(it - order.begin());
        for (std::size_t q = 0; q < pos; ++q) {
          if (counters) ++counters->ops;
          const std::size_t w = owner(order[q]);
          if (w != npos && residual[w] > deficit) {
            std::swap(order[q], order[pos]);
            return true;
          }
        }
        return false;
      };
      bool any = promote(ul_order[scn.users[v].bs], v, [](std::size_t u) { return u; });
      const std::size_t o = scn.users[v].teleoperator;
      if (o != npos)
        any = promote(dl_order[scn.teleoperators[o].bs], o, [&](std::size_t t) { return scn.teleoperators[t].user; }) || any;
      if (any) {
        ++moves[v];
        ++out.reorders;
        moved = true;
        break;
      }
    }
    forced.clear();
    if (!moved) {
      std::sort(out.violators.begin(), out.violators.end());
      return out;
    }
  }
}

}  // namespace tinfv
