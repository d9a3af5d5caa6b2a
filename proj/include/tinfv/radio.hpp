#pragma once

// Physical-layer evaluation: inter-cell interference, SINR, per-link rates
// and the radio constraints C1-C4.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tinfv/scenario.hpp"

namespace tinfv {

/// Subcarrier assignment and transmit power of one link direction. Rows are
/// tactile users (UL) or teleoperators (DL); columns are subcarriers. Power is
/// the substituted variable (assignment times power), so an unassigned entry
/// always carries zero power.
template <class Direction>
struct LinkAllocation {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> assign;
  std::vector<double> power;  // W

  LinkAllocation() = default;
  LinkAllocation(std::size_t r, std::size_t c) : rows(r), cols(c), assign(r * c, 0), power(r * c, 0.0) {}

  bool assigned(std::size_t i, std::size_t k) const { return assign[i * cols + k] != 0; }
  void set_assigned(std::size_t i, std::size_t k, bool on) { assign[i * cols + k] = on ? 1 : 0; }
  double p(std::size_t i, std::size_t k) const { return power[i * cols + k]; }
  double& p(std::size_t i, std::size_t k) { return power[i * cols + k]; }

  std::size_t count(std::size_t i) const
  {
    std::size_t n = 0;
    for (std::size_t k = 0; k < cols; ++k) n += assigned(i, k);
    return n;
  }

  double row_power(std::size_t i) const
  {
    double s = 0.0;
    for (std::size_t k = 0; k < cols; ++k) s += p(i, k);
    return s;
  }

  double total_power() const
  {
    double s = 0.0;
    for (double x : power) s += x;
    return s;
  }

  bool operator==(const LinkAllocation&) const = default;
};

struct UplinkTag {};
struct DownlinkTag {};
using UlAllocation = LinkAllocation<UplinkTag>;
using DlAllocation = LinkAllocation<DownlinkTag>;

inline UlAllocation empty_ul(const Scenario& scn) { return UlAllocation(scn.num_users(), scn.num_ul()); }
inline DlAllocation empty_dl(const Scenario& scn) { return DlAllocation(scn.num_teleoperators(), scn.num_dl()); }

namespace detail {
inline void check_index(bool ok, const char* what)
{
  if (!ok) throw std::out_of_range(what);
}
}  // namespace detail

/// Interference at the serving BS of user `u` on UL subcarrier `k` from every
/// user of another cell transmitting on `k`.
inline double ul_interference(const Scenario& scn, const UlAllocation& alloc, std::size_t u, std::size_t k)
{
  detail::check_index(u < scn.num_users() && k < scn.num_ul(), "ul_interference: index out of range");
  const std::size_t j = scn.users[u].bs;
  double total = 0.0;
  for (std::size_t v = 0; v < scn.num_users(); ++v)
    if (scn.users[v].bs != j) total += alloc.p(v, k) * scn.gain_ul(v, j, k);
  return total;
}

/// Interference at teleoperator `o` on DL subcarrier `l` from the other cells'
/// downlink transmissions on `l`.
inline double dl_interference(const Scenario& scn, const DlAllocation& alloc, std::size_t o, std::size_t l)
{
  detail::check_index(o < scn.num_teleoperators() && l < scn.num_dl(), "dl_interference: index out of range");
  const std::size_t j = scn.teleoperators[o].bs;
  double total = 0.0;
  for (std::size_t t = 0; t < scn.num_teleoperators(); ++t) {
    const std::size_t m = scn.teleoperators[t].bs;
    if (m != j) total += alloc.p(t, l) * scn.gain_dl(o, m, l);
  }
  return total;
}

inline double ul_sinr(const Scenario& scn, const UlAllocation& alloc, std::size_t u, std::size_t k)
{
  const double signal = alloc.p(u, k) * scn.gain_ul(u, scn.users[u].bs, k);
  return signal / (scn.noise_ul + ul_interference(scn, alloc, u, k));
}

inline double dl_sinr(const Scenario& scn, const DlAllocation& alloc, std::size_t o, std::size_t l)
{
  const double signal = alloc.p(o, l) * scn.gain_dl(o, scn.teleoperators[o].bs, l);
  return signal / (scn.noise_dl + dl_interference(scn, alloc, o, l));
}

/// Spectral efficiency of user `u` summed over its subcarriers, bit/s/Hz.
inline double ul_rate(const Scenario& scn, const UlAllocation& alloc, std::size_t u)
{
  detail::check_index(u < scn.num_users(), "ul_rate: user out of range");
  double r = 0.0;
  for (std::size_t k = 0; k < scn.num_ul(); ++k)
    if (alloc.assigned(u, k)) r += std::log2(1.0 + ul_sinr(scn, alloc, u, k));
  return r;
}

inline double dl_rate(const Scenario& scn, const DlAllocation& alloc, std::size_t o)
{
  detail::check_index(o < scn.num_teleoperators(), "dl_rate: teleoperator out of range");
  double r = 0.0;
  for (std::size_t l = 0; l < scn.num_dl(); ++l)
    if (alloc.assigned(o, l)) r += std::log2(1.0 + dl_sinr(scn, alloc, o, l));
  return r;
}

/// DL rate delivered to the teleoperator paired with user `u`; 0 when unpaired.
inline double paired_dl_rate(const Scenario& scn, const DlAllocation& alloc, std::size_t u)
{
  detail::check_index(u < scn.num_users(), "paired_dl_rate: user out of range");
  const std::size_t o = scn.users[u].teleoperator;
  return o == npos ? 0.0 : dl_rate(scn, alloc, o);
}

inline constexpr double kBinaryTolerance = 1e-9;
inline constexpr double kPowerTolerance = 1e-6;  // W

struct ConstraintCheck {
  std::string name;
  bool passed = true;
  double worst_residual = 0.0;  // max(lhs - rhs); > 0 is a violation
  std::string detail;
  bool operator==(const ConstraintCheck&) const = default;
};

struct ConstraintReport {
  std::vector<ConstraintCheck> checks;

  bool all_passed() const
  {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  const ConstraintCheck* find(const std::string& name) const
  {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  void append(const ConstraintReport& other) { checks.insert(checks.end(), other.checks.begin(), other.checks.end()); }
};

namespace detail {
class CheckBuilder {
public:
  CheckBuilder(std::string name, double tol) : tol_(tol) { check_.name = std::move(name); check_.worst_residual = -INFINITY; }

  void observe(double excess, const std::string& where)
  {
    if (excess > check_.worst_residual) {
      check_.worst_residual = excess;
      if (excess > tol_) check_.detail = where;
    }
    if (excess > tol_) check_.passed = false;
  }

  ConstraintCheck done()
  {
    if (check_.worst_residual == -INFINITY) check_.worst_residual = 0.0;
    return check_;
  }

private:
  double tol_;
  ConstraintCheck check_;
};

template <class Alloc, class BsOf>
ConstraintCheck exclusivity(const char* name, const Alloc& a, std::size_t num_bs, BsOf bs_of)
{
  CheckBuilder b(name, kBinaryTolerance);
  for (std::size_t j = 0; j < num_bs; ++j)
    for (std::size_t k = 0; k < a.cols; ++k) {
      double n = 0.0;
      for (std::size_t i = 0; i < a.rows; ++i)
        if (bs_of(i) == j) n += a.assigned(i, k);
      b.observe(n - 1.0, "bs " + std::to_string(j) + " subcarrier " + std::to_string(k));
    }
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      if (a.p(i, k) < -kPowerTolerance || (!a.assigned(i, k) && a.p(i, k) > 0.0))
        b.observe(1.0, "row " + std::to_string(i) + " subcarrier " + std::to_string(k) + " carries power unassigned");
    }
  return b.done();
}
}  // namespace detail

/// C1 (UL exclusivity), C2 (DL exclusivity), C3 (user power), C4 (BS power).
inline ConstraintReport check_radio_constraints(const Scenario& scn, const UlAllocation& ul, const DlAllocation& dl)
{
  ConstraintReport r;
  r.checks.push_back(detail::exclusivity("C1", ul, scn.num_bs(), [&](std::size_t u) { return scn.users[u].bs; }));
  r.checks.push_back(
      detail::exclusivity("C2", dl, scn.num_bs(), [&](std::size_t o) { return scn.teleoperators[o].bs; }));

  detail::CheckBuilder c3("C3", kPowerTolerance);
  for (std::size_t u = 0; u < scn.num_users(); ++u)
    c3.observe(ul.row_power(u) - scn.users[u].max_power, "user " + std::to_string(u));
  r.checks.push_back(c3.done());

  detail::CheckBuilder c4("C4", kPowerTolerance);
  for (std::size_t j = 0; j < scn.num_bs(); ++j) {
    double sum = 0.0;
    for (std::size_t o = 0; o < scn.num_teleoperators(); ++o)
      if (scn.teleoperators[o].bs == j) sum += dl.row_power(o);
    c4.observe(sum - scn.bs[j].max_power, "bs " + std::to_string(j));
  }
  r.checks.push_back(c4.done());
  return r;
}

}  // namespace tinfv
