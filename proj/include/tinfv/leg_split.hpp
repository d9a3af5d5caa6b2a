#pragma once

// Interference-free split of a radio delay budget between the UL and DL legs
// of one user: each leg's power is the water-filling minimum over its own
// channels, and the split minimises their sum.

#include <cmath>
#include <numeric>
#include <vector>

#include "tinfv/qos_delay.hpp"
#include "tinfv/sca.hpp"

namespace tinfv::leg_split {

struct Leg {
  std::vector<double> a;  // gain-to-noise ratios of the owned channels
  double demand = 0.0;    // bits to clear: payload plus the queue term
  double bandwidth = 0.0;
  double cap = 0.0;

  bool active() const { return demand > 0.0; }
  double power(double time) const
  {
    if (!active()) return 0.0;
    if (!(time > 0.0) || a.empty()) return kInfeasible;
    const auto p = waterfill_min_power(a, demand / (time * bandwidth));
    return std::accumulate(p.begin(), p.end(), 0.0);
  }
  // Shortest time whose power fits the cap; +inf when none does.
  double shortest(double horizon) const
  {
    if (!active()) return 0.0;
    if (!(power(horizon) <= cap)) return kInfeasible;
    double lo = 0.0, hi = horizon;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (power(mid) <= cap ? hi : lo) = mid;
    }
    return hi;
  }
};

struct LegSplit {
  bool feasible = false;
  double t_ul = 0.0, t_dl = 0.0, p_ul = 0.0, p_dl = 0.0;
};

// Minimises P_ul(T) + P_dl(R - T); the sum is convex in T.
inline LegSplit best_split(const Leg& ul, const Leg& dl, double radio)
{
  LegSplit s;
  if (!(radio > 0.0)) return s;
  const double lo = ul.shortest(radio);
  const double hi = dl.active() ? radio - dl.shortest(radio) : radio;
  if (!(lo <= hi)) return s;
  auto f = [&](double t) { return ul.power(t) + dl.power(radio - t); };
  double t = hi;
  if (dl.active() && ul.active()) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi, c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < 300 && b - a > 1e-15 * radio; ++i) {
      if (fc <= fd) b = d, d = c, fd = fc, c = b - g * (b - a), fc = f(c);
      else a = c, c = d, fc = fd, d = a + g * (b - a), fd = f(d);
    }
    t = 0.5 * (a + b);
    if (f(lo) < f(t)) t = lo;
    if (f(hi) < f(t)) t = hi;
  } else if (!ul.active()) {
    t = lo;
  }
  s.t_ul = t;
  s.t_dl = radio - t;
  s.p_ul = ul.power(s.t_ul);
  s.p_dl = dl.power(s.t_dl);
  s.feasible = std::isfinite(s.p_ul) && std::isfinite(s.p_dl) && s.p_ul <= ul.cap && s.p_dl <= dl.cap;
  return s;
}

}  // namespace tinfv::leg_split
