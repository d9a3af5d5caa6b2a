#pragma once

// Power allocation for fixed subcarrier assignments. Each link's rate is split
// as f(P) - g(P) with f, g concave (log of signal+interference+noise minus log
// of interference+noise); linearizing g around the current iterate turns the
// rate floors into convex constraints. Iterating yields a feasible,
// monotonically non-increasing sequence of total transmit powers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tinfv/convex.hpp"
#include "tinfv/qos_delay.hpp"
#include "tinfv/radio.hpp"
#include "tinfv/scenario.hpp"

namespace tinfv {

/// Uniform view over the UL (users -> serving BS) and DL (BS -> teleoperator)
/// link sets. Row i is a user or teleoperator; `cross_gain(i, r, k)` is the
/// gain from the transmitter of row r into the receiver of row i.
struct LinkView {
  const Scenario* scn = nullptr;
  bool uplink = true;

  static LinkView ul(const Scenario& s) { return {&s, true}; }
  static LinkView dl(const Scenario& s) { return {&s, false}; }

  std::size_t rows() const { return uplink ? scn->num_users() : scn->num_teleoperators(); }
  std::size_t cols() const { return uplink ? scn->num_ul() : scn->num_dl(); }
  std::size_t bs_of(std::size_t i) const { return uplink ? scn->users[i].bs : scn->teleoperators[i].bs; }
  double noise() const { return uplink ? scn->noise_ul : scn->noise_dl; }
  double bandwidth() const { return uplink ? scn->ul_bandwidth() : scn->dl_bandwidth(); }

  double own_gain(std::size_t i, std::size_t k) const
  {
    return uplink ? scn->gain_ul(i, bs_of(i), k) : scn->gain_dl(i, bs_of(i), k);
  }

  double cross_gain(std::size_t i, std::size_t r, std::size_t k) const
  {
    return uplink ? scn->gain_ul(r, bs_of(i), k) : scn->gain_dl(i, bs_of(r), k);
  }

  double interference(const std::vector<double>& power, std::size_t i, std::size_t k) const
  {
    double sum = 0.0;
    const std::size_t K = cols();
    for (std::size_t r = 0; r < rows(); ++r)
      if (bs_of(r) != bs_of(i)) sum += power[r * K + k] * cross_gain(i, r, k);
    return sum;
  }

  double rate(const std::vector<std::uint8_t>& assign, const std::vector<double>& power, std::size_t i) const
  {
    const std::size_t K = cols();
    double r = 0.0;
    for (std::size_t k = 0; k < K; ++k)
      if (assign[i * K + k])
        r += std::log2(1.0 + power[i * K + k] * own_gain(i, k) / (noise() + interference(power, i, k)));
    return r;
  }
};

/// Concave part of the rate of row i: sum over its subcarriers of
/// log2(noise + interference + own signal).
inline double dc_f(const LinkView& view, const std::vector<std::uint8_t>& assign, const std::vector<double>& power,
                   std::size_t i)
{
  const std::size_t K = view.cols();
  double v = 0.0;
  for (std::size_t k = 0; k < K; ++k)
    if (assign[i * K + k])
      v += std::log2(view.noise() + view.interference(power, i, k) + power[i * K + k] * view.own_gain(i, k));
  return v;
}

/// Subtracted concave part: sum over the subcarriers of row i of
/// log2(noise + interference).
inline double dc_g(const LinkView& view, const std::vector<std::uint8_t>& assign, const std::vector<double>& power,
                   std::size_t i)
{
  const std::size_t K = view.cols();
  double v = 0.0;
  for (std::size_t k = 0; k < K; ++k)
    if (assign[i * K + k]) v += std::log2(view.noise() + view.interference(power, i, k));
  return v;
}

/// Gradient of dc_g with respect to every (row, subcarrier) power, flattened
/// row-major. Entries of rows in the same cell as i are zero; an interferer r
/// on subcarrier k gets cross_gain / ((noise + I) ln 2).
inline std::vector<double> dc_g_gradient(const LinkView& view, const std::vector<std::uint8_t>& assign,
                                         const std::vector<double>& power, std::size_t i)
{
  const std::size_t K = view.cols();
  std::vector<double> grad(view.rows() * K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    if (!assign[i * K + k]) continue;
    const double denom = (view.noise() + view.interference(power, i, k)) * std::numbers::ln2;
    for (std::size_t r = 0; r < view.rows(); ++r)
      if (view.bs_of(r) != view.bs_of(i)) grad[r * K + k] += view.cross_gain(i, r, k) / denom;
  }
  return grad;
}

/// Power budgets as groups of rows sharing one cap (per user on the UL, per
/// BS on the DL).
struct PowerBudget {
  std::vector<std::size_t> rows;
  double cap = 0.0;
  std::string label;
};

inline std::vector<PowerBudget> budgets_for(const LinkView& view)
{
  std::vector<PowerBudget> out;
  const Scenario& s = *view.scn;
  if (view.uplink) {
    for (std::size_t u = 0; u < s.num_users(); ++u)
      out.push_back({{u}, s.users[u].max_power, "C3 user " + std::to_string(u)});
  } else {
    for (std::size_t j = 0; j < s.num_bs(); ++j) out.push_back({s.teleoperators_at(j), s.bs[j].max_power, "C4 bs " + std::to_string(j)});
  }
  return out;
}

/// Least total power meeting sum_k log2(1 + p_k a_k) >= rate, where a_k is
/// the gain-to-noise ratio of each channel: p_k = max(0, lambda - 1/a_k).
inline std::vector<double> waterfill_min_power(const std::vector<double>& a, double rate)
{
  std::vector<double> p(a.size(), 0.0);
  if (!(rate > 0.0)) return p;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] > 0.0) idx.push_back(k);
  if (idx.empty() || !std::isfinite(rate)) {
    std::fill(p.begin(), p.end(), kInfeasible);
    return p;
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return a[x] > a[y]; });
  // With the n best channels active: n log2(lambda) + sum log2(a_k) = rate.
  double log_sum = 0.0, level = 0.0;
  std::size_t n = 0;
  for (std::size_t m = 0; m < idx.size(); ++m) {
    log_sum += std::log2(a[idx[m]]);
    const double cand = std::exp2((rate - log_sum) / static_cast<double>(m + 1));
    if (cand * a[idx[m]] <= 1.0) break;  // the next channel would sit above the water
    level = cand;
    n = m + 1;
  }
  for (std::size_t m = 0; m < n; ++m) p[idx[m]] = level - 1.0 / a[idx[m]];
  return p;
}

enum class InitialPowerPolicy {
  half_budget,        // 50% of each budget split evenly, bisect up if short
  target_sinr_point,  // fixed point of the per-subcarrier SINR targets, else
                      // interference-free water-filling repaired by Phase I
};

struct ScaSettings {
  int max_iters = 50;
  double tolerance = 1e-7;  // relative objective change that ends the loop
  InitialPowerPolicy initial_power_policy = InitialPowerPolicy::target_sinr_point;
  double floor_margin = 1e-6;  // relative headroom demanded of the start point
  convex::Settings subsolver{};
};

struct LinkPowerResult {
  std::vector<double> power;
  bool feasible = false;
  std::string binding;
  std::vector<double> trace;  // total power (W) per SCA iterate, first entry = start point
  int sca_iterations = 0;
  int newton_iterations = 0;
  bool warning = false;
};

namespace detail {

inline bool meets_floors(const LinkView& v, const std::vector<std::uint8_t>& assign, const std::vector<double>& p,
                         const std::vector<double>& floors, double margin)
{
  for (std::size_t i = 0; i < v.rows(); ++i)
    if (floors[i] > 0.0 && !(v.rate(assign, p, i) > floors[i] * (1.0 + margin))) return false;
  return true;
}

inline bool within_budgets(const std::vector<PowerBudget>& budgets, const std::vector<double>& p, std::size_t K)
{
  for (const auto& b : budgets) {
    double sum = 0.0;
    for (std::size_t r : b.rows)
      for (std::size_t k = 0; k < K; ++k) sum += p[r * K + k];
    if (sum > b.cap) return false;
  }
  return true;
}

inline std::vector<double> split_budgets(const LinkView& v, const std::vector<std::uint8_t>& active,
                                         const std::vector<PowerBudget>& budgets, double fraction)
{
  const std::size_t K = v.cols();
  std::vector<double> p(v.rows() * K, 0.0);
  for (const auto& b : budgets) {
    std::size_t n = 0;
    for (std::size_t r : b.rows)
      for (std::size_t k = 0; k < K; ++k) n += active[r * K + k];
    if (n == 0) continue;
    const double each = fraction * b.cap / static_cast<double>(n);
    for (std::size_t r : b.rows)
      for (std::size_t k = 0; k < K; ++k)
        if (active[r * K + k]) p[r * K + k] = each;
  }
  return p;
}

// Standard interference-function iteration towards per-subcarrier SINR
// targets 2^(floor/n) - 1 with a small headroom.
inline std::vector<double> target_sinr_point(const LinkView& v, const std::vector<std::uint8_t>& active,
                                             const std::vector<double>& floors, double margin)
{
  const std::size_t K = v.cols();
  std::vector<double> target(v.rows(), 0.0);
  for (std::size_t i = 0; i < v.rows(); ++i) {
    std::size_t n = 0;
    for (std::size_t k = 0; k < K; ++k) n += active[i * K + k];
    if (n > 0 && floors[i] > 0.0) target[i] = std::exp2(floors[i] * (1.0 + 10.0 * margin) / static_cast<double>(n)) - 1.0;
  }
  std::vector<double> p(v.rows() * K, 0.0), next(p.size(), 0.0);
  for (int it = 0; it < 5000; ++it) {
    bool settled = true, finite = true;
    for (std::size_t i = 0; i < v.rows(); ++i)
      for (std::size_t k = 0; k < K; ++k) {
        const std::size_t idx = i * K + k;
        if (!active[idx]) continue;
        const double g = std::max(v.own_gain(i, k), 1e-300);
        next[idx] = target[i] * (v.noise() + v.interference(p, i, k)) / g;
        if (std::abs(next[idx] - p[idx]) > 1e-13 * next[idx]) settled = false;
        if (!std::isfinite(next[idx])) finite = false;
      }
    p.swap(next);
    if (settled || !finite) break;
  }
  return p;
}

// Each row water-filled against noise alone; entries left dry get a sliver
// so the start is interior.
inline std::vector<double> noise_only_point(const LinkView& v, const std::vector<std::uint8_t>& active,
                                            const std::vector<double>& floors)
{
  const std::size_t K = v.cols();
  std::vector<double> p(v.rows() * K, 0.0);
  for (std::size_t i = 0; i < v.rows(); ++i) {
    std::vector<double> a(K, 0.0);
    bool any = false;
    for (std::size_t k = 0; k < K; ++k)
      if (active[i * K + k]) a[k] = v.own_gain(i, k) / v.noise(), any = true;
    if (!any) continue;
    const auto w = waterfill_min_power(a, floors[i]);
    double top = 0.0;
    for (double x : w) top = std::max(top, x);
    for (std::size_t k = 0; k < K; ++k)
      if (active[i * K + k]) p[i * K + k] = std::max(w[k], 1e-6 * top);
  }
  return p;
}

}  // namespace detail

/// Minimizes the total power of one link direction subject to per-row rate
/// floors (bit/s/Hz) and the direction's power budgets.
inline LinkPowerResult allocate_link_power(const LinkView& view, const std::vector<std::uint8_t>& assign,
                                           const std::vector<double>& floors, const ScaSettings& st = {},
                                           const std::vector<double>* warm_start = nullptr)
{
  const std::size_t R = view.rows(), K = view.cols();
  LinkPowerResult res;
  res.power.assign(R * K, 0.0);

  // Rows with no floor transmit nothing.
  std::vector<std::uint8_t> active(R * K, 0);
  for (std::size_t i = 0; i < R; ++i) {
    if (!(floors[i] > 0.0)) continue;
    bool any = false;
    for (std::size_t k = 0; k < K; ++k)
      if (assign[i * K + k] && view.own_gain(i, k) > 0.0) active[i * K + k] = 1, any = true;
    if (!any || !std::isfinite(floors[i])) {
      res.binding = std::string(view.uplink ? "C7/C11" : "C8/C12") + " row " + std::to_string(i);
      return res;
    }
  }
  std::vector<std::size_t> vars;
  for (std::size_t idx = 0; idx < R * K; ++idx)
    if (active[idx]) vars.push_back(idx);
  if (vars.empty()) {
    res.feasible = true;
    res.trace = {0.0};
    return res;
  }

  const auto budgets = budgets_for(view);
  const double sigma = view.noise();

  // Starting point.
  std::vector<double> p;
  if (warm_start) {
    p.assign(R * K, 0.0);
    for (std::size_t idx : vars) p[idx] = (*warm_start)[idx];
  }
  auto usable = [&](const std::vector<double>& q) {
    for (std::size_t idx : vars)
      if (!(q[idx] > 0.0)) return false;
    return detail::within_budgets(budgets, q, K) && detail::meets_floors(view, active, q, floors, st.floor_margin);
  };
  auto half = [&] {
    auto q = detail::split_budgets(view, active, budgets, 0.5);
    if (usable(q)) return q;
    if (!usable(detail::split_budgets(view, active, budgets, 1.0))) return q;
    double lo = 0.5, hi = 1.0;
    for (int b = 0; b < 30; ++b) {
      const double mid = 0.5 * (lo + hi);
      (usable(detail::split_budgets(view, active, budgets, mid)) ? hi : lo) = mid;
    }
    return detail::split_budgets(view, active, budgets, hi);
  };
  if (p.empty() || !usable(p)) {
    auto fixed_point = [&] { return detail::target_sinr_point(view, active, floors, st.floor_margin); };
    if (st.initial_power_policy == InitialPowerPolicy::half_budget) {
      p = half();
      if (!usable(p)) {
        auto q = fixed_point();
        if (usable(q)) p = q;
      }
    } else {
      p = fixed_point();
      if (!usable(p)) p = detail::noise_only_point(view, active, floors);
    }
  }

  // Variables are noise-referred: y = p * gain / sigma.
  const auto n = static_cast<Eigen::Index>(vars.size());
  std::vector<double> scale(vars.size());
  std::vector<std::size_t> var_of(R * K, npos);
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const std::size_t i = vars[v] / K, k = vars[v] % K;
    scale[v] = sigma / view.own_gain(i, k);
    var_of[vars[v]] = v;
  }
  double mean_scale = 0.0;
  for (double s : scale) mean_scale += s / static_cast<double>(scale.size());

  auto to_y = [&](const std::vector<double>& q) {
    Eigen::VectorXd y(n);
    for (std::size_t v = 0; v < vars.size(); ++v) y[static_cast<Eigen::Index>(v)] = q[vars[v]] / scale[v];
    return y;
  };
  auto to_p = [&](const Eigen::VectorXd& y) {
    std::vector<double> q(R * K, 0.0);
    for (std::size_t v = 0; v < vars.size(); ++v) q[vars[v]] = std::max(0.0, y[static_cast<Eigen::Index>(v)] * scale[v]);
    return q;
  };
  auto total = [&](const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t idx : vars) s += q[idx];
    return s;
  };

  // Convexification of the rate floors around q.
  auto build = [&](const std::vector<double>& q) {
    convex::Problem prob;
    prob.n = vars.size();
    prob.cost.resize(n);
    for (std::size_t v = 0; v < vars.size(); ++v) prob.cost[static_cast<Eigen::Index>(v)] = scale[v] / mean_scale;
    for (const auto& b : budgets) {
      convex::LinearConstraint c;
      c.label = b.label;
      for (std::size_t r : b.rows)
        for (std::size_t k = 0; k < K; ++k)
          if (var_of[r * K + k] != npos) c.a.add(var_of[r * K + k], scale[var_of[r * K + k]] / b.cap);
      c.b = 1.0;
      if (!c.a.entries.empty()) prob.linear.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < R; ++i) {
      if (!(floors[i] > 0.0)) continue;
      convex::ConcaveConstraint c;
      c.label = std::string(view.uplink ? "C7/C11" : "C8/C12") + " row " + std::to_string(i);
      c.constant = -floors[i];
      for (std::size_t k = 0; k < K; ++k) {
        if (!active[i * K + k]) continue;
        convex::LogTerm f_term;
        f_term.offset = 1.0;
        f_term.weights.add(var_of[i * K + k], 1.0);
        convex::SparseVec interf;  // I / sigma in y units
        double i0 = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
          if (view.bs_of(r) == view.bs_of(i) || var_of[r * K + k] == npos) continue;
          const std::size_t v = var_of[r * K + k];
          const double w = scale[v] * view.cross_gain(i, r, k) / sigma;
          if (w == 0.0) continue;
          interf.add(v, w);
          i0 += w * q[r * K + k] / scale[v];
        }
        for (const auto& e : interf.entries) f_term.weights.add(e.first, e.second);
        c.terms.push_back(std::move(f_term));
        // -g linearized: -[log2(1 + I0) + sum w (y - y0) / ((1 + I0) ln 2)]
        const double denom = (1.0 + i0) * std::numbers::ln2;
        double lin_at_y0 = 0.0;
        for (const auto& [v, w] : interf.entries) {
          c.linear.add(v, -w / denom);
          lin_at_y0 += w / denom * (q[vars[v]] / scale[v]);
        }
        c.constant += -std::log2(1.0 + i0) + lin_at_y0;
      }
      prob.concave.push_back(std::move(c));
    }
    return prob;
  };

  bool have_feasible = !p.empty() && usable(p);
  bool tried_half = st.initial_power_policy == InitialPowerPolicy::half_budget;
  if (p.empty()) p = detail::split_budgets(view, active, budgets, 0.5);
  if (have_feasible) res.trace.push_back(total(p));

  for (int it = 0; it < st.max_iters; ++it) {
    const auto prob = build(p);
    const Eigen::VectorXd y0 = to_y(p);
    auto sol = convex::solve(prob, y0, st.subsolver);
    res.newton_iterations += sol.newton_iterations;
    res.warning = res.warning || sol.warning;
    ++res.sca_iterations;
    if (sol.status == convex::Status::infeasible) {
      if (have_feasible) break;
      if (!tried_half) {
        // The convexification around an infeasible point can be too
        // pessimistic; fall back to the budget-driven start.
        tried_half = true;
        auto q = half();
        if (usable(q)) {
          p = std::move(q);
          have_feasible = true;
          res.trace.push_back(total(p));
          continue;
        }
      }
      res.binding = sol.binding;
      return res;
    }
    auto next = to_p(sol.x);
    // The convexified constraint under-estimates the rate, so `next` is
    // feasible for the true floors; keep the iterate only if it does not
    // increase the objective.
    const double obj = total(next);
    if (!detail::within_budgets(budgets, next, K)) break;
    if (have_feasible && obj > res.trace.back()) break;
    const double prev = have_feasible ? res.trace.back() : obj;
    p = std::move(next);
    have_feasible = true;
    res.trace.push_back(obj);
    if (std::abs(prev - obj) <= st.tolerance * std::max(prev, 1e-300) && it > 0) break;
  }
  res.feasible = have_feasible;
  if (have_feasible) res.power = p;
  return res;
}

/// Per-user rate floors (bit/s/Hz) implied by a delay budget: the larger of
/// the transmission-delay and the queuing-delay requirement.
inline double rate_floor(double payload_bits, double t_delay, double q_delay, double delta, double theta,
                         double subcarrier_bw)
{
  const double by_tx = payload_bits > 0.0 ? (t_delay > 0.0 ? payload_bits / (t_delay * subcarrier_bw) : kInfeasible) : 0.0;
  const double by_q = min_rate_for_queue(delta, theta, q_delay) / subcarrier_bw;
  return std::max(by_tx, by_q);
}

struct PowerAllocation {
  UlAllocation ul;
  DlAllocation dl;
  bool feasible = false;
  std::string binding;
  std::vector<double> trace;  // UL + DL total power per iterate
  LinkPowerResult ul_result;
  LinkPowerResult dl_result;
  int sca_iterations() const { return ul_result.sca_iterations + dl_result.sca_iterations; }
};

/// Joint UL/DL power step for fixed assignments and per-user delay budgets.
/// Unpaired users have no DL leg.
inline PowerAllocation allocate_power_sca(const Scenario& scn, const UlAllocation& x, const DlAllocation& t,
                                          const std::vector<DelayBudget>& budgets, const ScaSettings& st = {},
                                          const UlAllocation* warm_ul = nullptr, const DlAllocation* warm_dl = nullptr)
{
  const auto& cfg = scn.config;
  std::vector<double> ul_floor(scn.num_users(), 0.0), dl_floor(scn.num_teleoperators(), 0.0);
  for (std::size_t u = 0; u < scn.num_users(); ++u) {
    const auto& b = budgets.at(u);
    ul_floor[u] = rate_floor(scn.payload(u), b.t_ul, b.q_ul, cfg.violation_prob_ul, cfg.qos_exponent_ul, scn.ul_bandwidth());
    const std::size_t o = scn.users[u].teleoperator;
    if (o != npos)
      dl_floor[o] = rate_floor(scn.payload(u), b.t_dl, b.q_dl, cfg.violation_prob_dl, cfg.qos_exponent_dl, scn.dl_bandwidth());
  }

  PowerAllocation out;
  out.ul = x;
  out.dl = t;
  out.ul_result = allocate_link_power(LinkView::ul(scn), x.assign, ul_floor, st, warm_ul ? &warm_ul->power : nullptr);
  out.dl_result = allocate_link_power(LinkView::dl(scn), t.assign, dl_floor, st, warm_dl ? &warm_dl->power : nullptr);
  out.feasible = out.ul_result.feasible && out.dl_result.feasible;
  out.binding = !out.ul_result.feasible ? out.ul_result.binding : out.dl_result.binding;
  out.ul.power = out.ul_result.power;
  out.dl.power = out.dl_result.power;

  const auto& a = out.ul_result.trace;
  const auto& b = out.dl_result.trace;
  const std::size_t len = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < len; ++i) {
    const double ua = a.empty() ? 0.0 : a[std::min(i, a.size() - 1)];
    const double db = b.empty() ? 0.0 : b[std::min(i, b.size() - 1)];
    out.trace.push_back(ua + db);
  }
  return out;
}

}  // namespace tinfv
