#pragma once

// Dense two-phase tableau simplex with Bland's rule, for tiny LPs:
//   min c'x  s.t.  a_i'x (<=|>=|=) b_i,  x >= 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace lp {

enum class Sense { le, ge, eq };

struct Row {
  std::vector<double> a;
  Sense sense;
  double b;
};

struct Solution {
  bool feasible = false;
  bool bounded = true;
  std::vector<double> x;
  double objective = 0.0;
};

inline Solution solve(const std::vector<double>& c, std::vector<Row> rows, double eps = 1e-12)
{
  const std::size_t n = c.size(), m = rows.size();
  // Normalise to b >= 0.
  for (auto& r : rows)
    if (r.b < 0) {
      for (auto& v : r.a) v = -v;
      r.b = -r.b;
      r.sense = r.sense == Sense::le ? Sense::ge : r.sense == Sense::ge ? Sense::le : Sense::eq;
    }
  // Columns: x (n), slack/surplus (one per inequality), artificials.
  std::size_t ns = 0, na = 0;
  for (const auto& r : rows) {
    if (r.sense != Sense::eq) ++ns;
    if (r.sense != Sense::le) ++na;
  }
  const std::size_t cols = n + ns + na;
  std::vector<std::vector<double>> T(m, std::vector<double>(cols + 1, 0.0));
  std::vector<std::size_t> basis(m);
  std::size_t si = n, ai = n + ns;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i][j] = rows[i].a[j];
    T[i][cols] = rows[i].b;
    if (rows[i].sense == Sense::le) {
      T[i][si] = 1.0;
      basis[i] = si++;
    } else {
      if (rows[i].sense == Sense::ge) T[i][si++] = -1.0;
      T[i][ai] = 1.0;
      basis[i] = ai++;
    }
  }

  auto pivot = [&](std::size_t r, std::size_t e) {
    const double pv = T[r][e];
    for (auto& v : T[r]) v /= pv;
    for (std::size_t i = 0; i < m; ++i)
      if (i != r && T[i][e] != 0.0) {
        const double f = T[i][e];
        for (std::size_t j = 0; j <= cols; ++j) T[i][j] -= f * T[r][j];
      }
    basis[r] = e;
  };

  // Runs the simplex on cost vector `cost` over the allowed columns.
  auto run = [&](const std::vector<double>& cost, std::size_t allowed) -> bool {
    for (int guard = 0; guard < 10000; ++guard) {
      // Reduced costs.
      std::size_t enter = cols;
      for (std::size_t j = 0; j < allowed && enter == cols; ++j) {
        double rc = cost[j];
        for (std::size_t i = 0; i < m; ++i) rc -= cost[basis[i]] * T[i][j];
        if (rc < -eps) enter = j;
      }
      if (enter == cols) return true;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i)
        if (T[i][enter] > eps) {
          const double ratio = T[i][cols] / T[i][enter];
          if (ratio < best || (ratio == best && leave < m && basis[i] < basis[leave])) best = ratio, leave = i;
        }
      if (leave == m) return false;
      pivot(leave, enter);
    }
    return false;
  };

  Solution s;
  std::vector<double> phase1(cols, 0.0);
  for (std::size_t j = n + ns; j < cols; ++j) phase1[j] = 1.0;
  run(phase1, cols);
  double infeas = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n + ns) infeas += T[i][cols];
  if (infeas > eps * (1.0 + [&] {
        double scale = 0.0;
        for (const auto& r : rows) scale = std::max(scale, std::abs(r.b));
        return scale;
      }()))
    return s;
  // Drive remaining artificials out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n + ns)
      for (std::size_t j = 0; j < n + ns; ++j)
        if (std::abs(T[i][j]) > eps) {
          pivot(i, j);
          break;
        }
  s.feasible = true;
  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = c[j];
  s.bounded = run(cost, n + ns);
  s.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) s.x[basis[i]] = T[i][cols];
  for (std::size_t j = 0; j < n; ++j) s.objective += c[j] * s.x[j];
  return s;
}

}  // namespace lp
