#pragma once

// Statistical queuing-delay bounds from the effective bandwidth of a Poisson
// source, transmission delays and the end-to-end budget C6. Delays are in
// seconds and rates in bit/s throughout.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tinfv {

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

/// B = Lambda (e^theta - 1) / theta.
inline double effective_bandwidth(double arrival_rate, double theta)
{
  if (!(theta > 0.0)) throw std::domain_error("effective_bandwidth: QoS exponent must be > 0");
  if (arrival_rate < 0.0) throw std::domain_error("effective_bandwidth: arrival rate must be >= 0");
  return arrival_rate * std::expm1(theta) / theta;
}

/// Probability that the queuing delay exceeds `q_delay`:
/// eta * exp(-theta B D) = eta * exp(-Lambda (e^theta - 1) D).
inline double queue_violation(double arrival_rate, double theta, double q_delay, double nonempty_prob)
{
  return nonempty_prob * std::exp(-arrival_rate * std::expm1(theta) * q_delay);
}

inline double ul_queue_violation(double arrival_rate, double theta, double q_delay, double eta1)
{
  return queue_violation(arrival_rate, theta, q_delay, eta1);
}

inline double dl_queue_violation(double arrival_rate, double theta, double q_delay, double eta2)
{
  return queue_violation(arrival_rate, theta, q_delay, eta2);
}

/// Smallest arrival rate Lambda whose violation probability at `q_delay`
/// stays below `delta`. With Lambda equal to the service rate this is the
/// rate floor of C11 / C12. Returns +inf for a zero delay.
inline double min_rate_for_queue(double delta, double theta, double q_delay)
{
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("min_rate_for_queue: delta must lie in (0, 1)");
  if (!(theta > 0.0)) throw std::domain_error("min_rate_for_queue: theta must be > 0");
  if (q_delay < 0.0) throw std::domain_error("min_rate_for_queue: delay must be >= 0");
  if (q_delay == 0.0) return kInfeasible;
  return std::log(1.0 / delta) / (std::expm1(theta) * q_delay);
}

/// Inverse of min_rate_for_queue in the delay argument. +inf for a zero rate.
inline double min_q_delay_for_rate(double delta, double theta, double rate)
{
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("min_q_delay_for_rate: delta must lie in (0, 1)");
  if (!(theta > 0.0)) throw std::domain_error("min_q_delay_for_rate: theta must be > 0");
  if (!(rate > 0.0)) return kInfeasible;
  return std::log(1.0 / delta) / (std::expm1(theta) * rate);
}

/// C / r; +inf when a positive payload meets a zero rate.
inline double transmission_delay(double payload_bits, double rate)
{
  if (payload_bits == 0.0) return 0.0;
  if (!(rate > 0.0)) return kInfeasible;
  return payload_bits / rate;
}

/// The five delay components of one user plus its cap.
struct DelayBudget {
  double t_ul = 0.0;
  double t_dl = 0.0;
  double q_ul = 0.0;
  double q_dl = 0.0;
  double nfs = 0.0;
  double cap = 0.0;

  double total() const { return t_ul + t_dl + q_ul + q_dl + nfs; }
  double radio() const { return t_ul + t_dl + q_ul + q_dl; }
  bool operator==(const DelayBudget&) const = default;
};

struct E2eCheck {
  bool feasible = false;
  double residual = 0.0;  // cap - total; negative when violated
};

inline E2eCheck check_e2e(const DelayBudget& b, double tol = 0.0)
{
  const double residual = b.cap - b.total();
  return {residual >= -tol, residual};
}

}  // namespace tinfv
