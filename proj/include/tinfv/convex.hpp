#pragma once

// Small dense log-barrier interior-point method for
//
//   minimize    c' x
//   subject to  x > 0,
//               a_i' x <= b_i                              (linear budgets)
//               sum_t log2(o_t + w_t' x) + l' x + k >= 0   (concave rate floors)
//
// which is exactly the shape of one convexified power-allocation step.
// Infeasible instances are detected by a Phase I that minimizes the largest
// constraint violation.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tinfv::convex {

struct SparseVec {
  std::vector<std::pair<std::size_t, double>> entries;

  void add(std::size_t i, double v) { entries.emplace_back(i, v); }

  double dot(const Eigen::VectorXd& x) const
  {
    double s = 0.0;
    for (const auto& [i, v] : entries) s += v * x[static_cast<Eigen::Index>(i)];
    return s;
  }
};

/// coeff * log2(offset + weights' x)
struct LogTerm {
  double offset = 0.0;
  SparseVec weights;
  double coeff = 1.0;
};

struct ConcaveConstraint {
  std::vector<LogTerm> terms;
  SparseVec linear;
  double constant = 0.0;
  std::string label;

  double value(const Eigen::VectorXd& x) const
  {
    double v = constant + linear.dot(x);
    for (const auto& t : terms) v += t.coeff * std::log2(t.offset + t.weights.dot(x));
    return v;
  }

  bool in_domain(const Eigen::VectorXd& x) const
  {
    for (const auto& t : terms)
      if (!(t.offset + t.weights.dot(x) > 0.0)) return false;
    return true;
  }
};

struct LinearConstraint {
  SparseVec a;
  double b = 0.0;
  std::string label;
};

struct Problem {
  std::size_t n = 0;
  Eigen::VectorXd cost;
  std::vector<LinearConstraint> linear;
  std::vector<ConcaveConstraint> concave;

  double objective(const Eigen::VectorXd& x) const { return cost.dot(x); }

  /// Largest violation over all constraints (<= 0 when feasible).
  double max_violation(const Eigen::VectorXd& x) const
  {
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i) worst = std::max(worst, -x[i]);
    for (const auto& c : linear) worst = std::max(worst, c.a.dot(x) - c.b);
    for (const auto& c : concave) worst = std::max(worst, c.in_domain(x) ? -c.value(x) : std::numeric_limits<double>::infinity());
    return worst;
  }
};

struct Settings {
  double rel_gap = 1e-9;          // duality-gap target relative to |objective|
  double abs_gap = 1e-300;        // floor for the gap target
  double mu = 20.0;               // barrier parameter growth
  int max_newton_per_center = 100;
  int max_centering = 80;
  double newton_tol = 1e-9;       // lambda^2 / 2
};

enum class Status { optimal, infeasible, iteration_limit };

struct Result {
  Status status = Status::iteration_limit;
  Eigen::VectorXd x;
  double objective = 0.0;
  int newton_iterations = 0;
  std::string binding;  // most violated constraint when infeasible
  bool warning = false;  // centering did not converge somewhere
};

namespace detail {

inline constexpr double kLn2 = std::numbers::ln2;

// Barrier over slack functions g_i(z) > 0 with z = (x, s?). When `phase1` the
// extra last coordinate s relaxes every non-positivity constraint:
// g_i(x) + s > 0, and the objective is s.
class Barrier {
public:
  Barrier(const Problem& p, bool phase1) : p_(p), phase1_(phase1), n_(p.n), dim_(p.n + (phase1 ? 1 : 0)) {}

  Eigen::Index dim() const { return static_cast<Eigen::Index>(dim_); }
  std::size_t count() const { return n_ + p_.linear.size() + p_.concave.size() + (phase1_ ? 1 : 0); }

  double base_objective(const Eigen::VectorXd& z) const
  {
    return phase1_ ? z[dim() - 1] : p_.cost.dot(z.head(static_cast<Eigen::Index>(n_)));
  }

  bool in_domain(const Eigen::VectorXd& z) const
  {
    const Eigen::VectorXd x = z.head(static_cast<Eigen::Index>(n_));
    const double s = phase1_ ? z[dim() - 1] : 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      if (!(x[static_cast<Eigen::Index>(i)] > 0.0)) return false;
    for (const auto& c : p_.linear)
      if (!(c.b - c.a.dot(x) + s > 0.0)) return false;
    for (const auto& c : p_.concave) {
      if (!c.in_domain(x)) return false;
      if (!(c.value(x) + s > 0.0)) return false;
    }
    if (phase1_ && !(s + 1.0 > 0.0)) return false;
    return true;
  }

  double value(const Eigen::VectorXd& z, double t) const
  {
    if (!in_domain(z)) return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd x = z.head(static_cast<Eigen::Index>(n_));
    const double s = phase1_ ? z[dim() - 1] : 0.0;
    double v = t * base_objective(z);
    for (std::size_t i = 0; i < n_; ++i) v -= std::log(x[static_cast<Eigen::Index>(i)]);
    for (const auto& c : p_.linear) v -= std::log(c.b - c.a.dot(x) + s);
    for (const auto& c : p_.concave) v -= std::log(c.value(x) + s);
    if (phase1_) v -= std::log(s + 1.0);
    return v;
  }

  void derivatives(const Eigen::VectorXd& z, double t, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const
  {
    const auto nn = static_cast<Eigen::Index>(n_);
    const Eigen::VectorXd x = z.head(nn);
    const double s = phase1_ ? z[dim() - 1] : 0.0;
    grad.setZero(dim());
    hess.setZero(dim(), dim());
    if (phase1_) grad[dim() - 1] = t;
    else grad.head(nn) = t * p_.cost;

    for (Eigen::Index i = 0; i < nn; ++i) {
      grad[i] -= 1.0 / x[i];
      hess(i, i) += 1.0 / (x[i] * x[i]);
    }
    // Constraint gradients are sparse; accumulate them as index/value lists.
    std::vector<std::pair<Eigen::Index, double>> dg;
    auto add_outer = [&](double g) {
      for (const auto& [i, vi] : dg) {
        grad[i] -= vi / g;
        for (const auto& [k, vk] : dg) hess(i, k) += vi * vk / (g * g);
      }
    };
    const Eigen::Index slack = dim() - 1;
    for (const auto& c : p_.linear) {
      const double g = c.b - c.a.dot(x) + s;
      dg.clear();
      for (const auto& [i, v] : c.a.entries) dg.emplace_back(static_cast<Eigen::Index>(i), -v);
      if (phase1_) dg.emplace_back(slack, 1.0);
      add_outer(g);
    }
    for (const auto& c : p_.concave) {
      const double g = c.value(x) + s;
      dg.clear();
      for (const auto& [i, v] : c.linear.entries) dg.emplace_back(static_cast<Eigen::Index>(i), v);
      for (const auto& term : c.terms) {
        const double arg = term.offset + term.weights.dot(x);
        const double scale = term.coeff / (arg * kLn2);
        for (const auto& [i, v] : term.weights.entries) dg.emplace_back(static_cast<Eigen::Index>(i), scale * v);
        // -Hess(phi)/g: each log term contributes coeff w w' / (ln2 arg^2 g).
        const double h = term.coeff / (kLn2 * arg * arg * g);
        for (const auto& [i, vi] : term.weights.entries)
          for (const auto& [k, vk] : term.weights.entries)
            hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) += h * vi * vk;
      }
      if (phase1_) dg.emplace_back(slack, 1.0);
      add_outer(g);
    }
    if (phase1_) {
      const double g = s + 1.0;
      grad[dim() - 1] -= 1.0 / g;
      hess(dim() - 1, dim() - 1) += 1.0 / (g * g);
    }
  }

private:
  const Problem& p_;
  bool phase1_;
  std::size_t n_;
  std::size_t dim_;
};

struct CenterResult {
  int iterations = 0;
  bool converged = false;
};

template <class Stop>
CenterResult center(const Barrier& bar, Eigen::VectorXd& z, double t, const Settings& st, Stop&& early_stop)
{
  CenterResult r;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  for (; r.iterations < st.max_newton_per_center; ++r.iterations) {
    if (early_stop(z)) { r.converged = true; return r; }
    bar.derivatives(z, t, grad, hess);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd step = -ldlt.solve(grad);
    if (!step.allFinite() || ldlt.info() != Eigen::Success) {
      const double reg = 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
      hess.diagonal().array() += reg;
      step = -hess.ldlt().solve(grad);
      if (!step.allFinite()) return r;
    }
    const double lambda2 = -grad.dot(step);
    const double f0 = bar.value(z, t);
    // Below ~1e-13 |f0| the decrease is lost in rounding of f itself.
    if (lambda2 / 2.0 <= std::max(st.newton_tol, 1e-13 * std::abs(f0))) { r.converged = true; return r; }
    double alpha = 1.0;
    Eigen::VectorXd trial = z + alpha * step;
    int backtracks = 0;
    while (!(bar.value(trial, t) <= f0 - 0.25 * alpha * lambda2)) {
      alpha *= 0.5;
      trial = z + alpha * step;
      if (++backtracks > 60) { r.converged = lambda2 < 1e-6; return r; }
    }
    z = trial;
  }
  return r;
}

}  // namespace detail

/// Solves the barrier problem. `start` must be strictly feasible to skip
/// Phase I; otherwise any positive point serves as a Phase I seed.
inline Result solve(const Problem& p, std::optional<Eigen::VectorXd> start = std::nullopt, const Settings& st = {})
{
  Result res;
  const auto nn = static_cast<Eigen::Index>(p.n);
  Eigen::VectorXd x = start ? *start : Eigen::VectorXd::Constant(nn, 1.0);
  for (Eigen::Index i = 0; i < nn; ++i)
    if (!(x[i] > 0.0)) x[i] = 1e-6;

  if (!(p.max_violation(x) < 0.0)) {
    detail::Barrier ph1(p, true);
    Eigen::VectorXd z(nn + 1);
    z.head(nn) = x;
    // Start with slack past the worst violation, inside s > -1.
    const double worst = p.max_violation(x);
    z[nn] = std::isfinite(worst) ? std::max(worst, 0.0) + 1.0 : 1e3;
    if (!ph1.in_domain(z)) {
      res.status = Status::infeasible;
      res.binding = "domain";
      res.x = x;
      return res;
    }
    double t = 1.0;
    bool found = false;
    auto feasible_now = [&](const Eigen::VectorXd& zz) { return zz[nn] < 0.0 && p.max_violation(zz.head(nn)) < 0.0; };
    for (int outer = 0; outer < st.max_centering && !found; ++outer) {
      auto c = detail::center(ph1, z, t, st, feasible_now);
      res.newton_iterations += c.iterations;
      if (feasible_now(z)) { found = true; break; }
      const double gap = static_cast<double>(ph1.count()) / t;
      if (z[nn] - gap > 1e-12) break;  // certified: min slack stays positive
      if (gap < 1e-14) break;
      t *= st.mu;
    }
    if (!found) {
      res.status = Status::infeasible;
      res.x = z.head(nn);
      double worst_v = -std::numeric_limits<double>::infinity();
      const Eigen::VectorXd xf = z.head(nn);
      for (const auto& c : p.concave)
        if (-c.value(xf) > worst_v) worst_v = -c.value(xf), res.binding = c.label;
      for (const auto& c : p.linear)
        if (c.a.dot(xf) - c.b > worst_v) worst_v = c.a.dot(xf) - c.b, res.binding = c.label;
      return res;
    }
    x = z.head(nn);
  }

  detail::Barrier bar(p, false);
  const double m = static_cast<double>(bar.count());
  double obj = std::abs(p.cost.dot(x));
  double t = m / std::max(obj, 1e-300);
  Eigen::VectorXd z = x;
  auto never = [](const Eigen::VectorXd&) { return false; };
  for (int outer = 0; outer < st.max_centering; ++outer) {
    auto c = detail::center(bar, z, t, st, never);
    res.newton_iterations += c.iterations;
    if (!c.converged) res.warning = true;
    obj = std::abs(p.cost.dot(z));
    if (m / t <= std::max(st.rel_gap * obj, st.abs_gap)) {
      res.status = Status::optimal;
      break;
    }
    t *= st.mu;
  }
  res.x = z;
  res.objective = p.cost.dot(z);
  if (res.status != Status::optimal) res.warning = true;
  return res;
}

}  // namespace tinfv::convex
