#pragma once

// Problem instances: topology, user/teleoperator population, service chains,
// per-frame channel realizations and every numerical constant.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tinfv/rng.hpp"
#include "tinfv/units.hpp"

namespace tinfv {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

/// Thrown when a configuration or scenario breaks one or more invariants.
/// `violations()` lists every broken invariant, each prefixed by its field.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::invalid_argument(join(violations)), violations_(std::move(violations))
  {
  }

  const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  static std::string join(const std::vector<std::string>& v)
  {
    std::string out = "invalid configuration:";
    for (const auto& s : v) out += "\n  " + s;
    return out;
  }

  std::vector<std::string> violations_;
};

struct NfSpec {
  std::string nf_id;
  // Entry i applies to BS i; BSs past the end reuse the last entry, so
  // {mbs, sbs} covers any number of small cells.
  std::vector<double> processing_coefficient_per_bs{1.0};

  double coefficient(std::size_t bs) const
  {
    if (processing_coefficient_per_bs.empty()) return 0.0;
    return processing_coefficient_per_bs[std::min(bs, processing_coefficient_per_bs.size() - 1)];
  }

  bool operator==(const NfSpec&) const = default;
};

struct ServiceSpec {
  std::string service_id;
  double e2e_delay_max = 1e-3;  // s
  double payload_bits = 500.0;
  std::vector<NfSpec> chain;

  bool operator==(const ServiceSpec&) const = default;
};

struct ScenarioConfig {
  std::size_t num_sbs = 4;
  double coverage_area = 10.0;  // km^2
  std::size_t num_ul_subcarriers = 8;
  std::size_t num_dl_subcarriers = 16;
  double ul_bandwidth = 5e6;   // Hz
  double dl_bandwidth = 5e6;   // Hz
  double noise_psd = -174.0;   // dBm/Hz
  double pathloss_exponent = 3.0;
  double qos_exponent_ul = 11.0;
  double qos_exponent_dl = 11.0;
  double violation_prob_ul = 1e-3;
  double violation_prob_dl = 1e-3;
  double nonempty_buffer_prob_ul = 1.0;
  double nonempty_buffer_prob_dl = 1.0;
  double max_power_mbs = 46.0;   // dBm
  double max_power_sbs = 43.0;   // dBm
  double max_power_user = 23.0;  // dBm
  double cost_weight_power = 1.0;  // $/W
  double cost_weight_exec = 1.0;   // $/ms
  std::vector<ServiceSpec> services;
  std::size_t users_per_bs_per_service = 5;
  double backhaul_capacity = 1e9;  // bit/s, every inter-BS link
  // Entry i applies to BS i; BSs past the end reuse the last entry.
  std::vector<double> processing_rate{1e9};  // bit/s
  std::uint64_t rng_seed = 1;

  std::size_t num_bs() const { return num_sbs + 1; }
  double ul_subcarrier_bandwidth() const { return ul_bandwidth / static_cast<double>(num_ul_subcarriers); }
  double dl_subcarrier_bandwidth() const { return dl_bandwidth / static_cast<double>(num_dl_subcarriers); }

  double processing_rate_at(std::size_t bs) const
  {
    if (processing_rate.empty()) return 0.0;
    return processing_rate[std::min(bs, processing_rate.size() - 1)];
  }

  bool operator==(const ScenarioConfig&) const = default;
};

/// Every violated invariant of `c`, empty when valid.
inline std::vector<std::string> config_violations(const ScenarioConfig& c)
{
  std::vector<std::string> v;
  auto positive = [&](const char* name, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) v.push_back(std::string(name) + ": must be finite and > 0");
  };
  auto open_prob = [&](const char* name, double x) {
    if (!(x > 0.0 && x < 1.0)) v.push_back(std::string(name) + ": must lie in (0, 1)");
  };
  auto half_open_prob = [&](const char* name, double x) {
    if (!(x > 0.0 && x <= 1.0)) v.push_back(std::string(name) + ": must lie in (0, 1]");
  };

  if (c.num_ul_subcarriers < 1) v.push_back("num_ul_subcarriers: must be >= 1");
  if (c.num_dl_subcarriers < 1) v.push_back("num_dl_subcarriers: must be >= 1");
  positive("coverage_area", c.coverage_area);
  positive("ul_bandwidth", c.ul_bandwidth);
  positive("dl_bandwidth", c.dl_bandwidth);
  if (!std::isfinite(c.noise_psd)) v.push_back("noise_psd: must be finite");
  positive("pathloss_exponent", c.pathloss_exponent);
  positive("qos_exponent_ul", c.qos_exponent_ul);
  positive("qos_exponent_dl", c.qos_exponent_dl);
  open_prob("violation_prob_ul", c.violation_prob_ul);
  open_prob("violation_prob_dl", c.violation_prob_dl);
  half_open_prob("nonempty_buffer_prob_ul", c.nonempty_buffer_prob_ul);
  half_open_prob("nonempty_buffer_prob_dl", c.nonempty_buffer_prob_dl);
  if (!std::isfinite(c.max_power_mbs)) v.push_back("max_power_mbs: must be finite");
  if (!std::isfinite(c.max_power_sbs)) v.push_back("max_power_sbs: must be finite");
  if (!std::isfinite(c.max_power_user)) v.push_back("max_power_user: must be finite");
  if (!(c.cost_weight_power >= 0.0)) v.push_back("cost_weight_power: must be >= 0");
  if (!(c.cost_weight_exec >= 0.0)) v.push_back("cost_weight_exec: must be >= 0");
  positive("backhaul_capacity", c.backhaul_capacity);
  if (c.processing_rate.empty()) v.push_back("processing_rate: must list at least one rate");
  for (double r : c.processing_rate) positive("processing_rate", r);
  if (c.services.empty()) v.push_back("services: must list at least one service");
  for (std::size_t s = 0; s < c.services.size(); ++s) {
    const auto& svc = c.services[s];
    const std::string p = "services[" + std::to_string(s) + "].";
    if (!(svc.e2e_delay_max > 0.0)) v.push_back(p + "e2e_delay_max: must be > 0");
    if (!(svc.payload_bits > 0.0)) v.push_back(p + "payload_bits: must be > 0");
    if (svc.chain.empty()) v.push_back(p + "chain: must contain at least one NF");
    for (std::size_t f = 0; f < svc.chain.size(); ++f) {
      const auto& coeffs = svc.chain[f].processing_coefficient_per_bs;
      if (coeffs.empty())
        v.push_back(p + "chain[" + std::to_string(f) + "].processing_coefficient_per_bs: must not be empty");
      for (double b : coeffs)
        if (!(b > 0.0))
          v.push_back(p + "chain[" + std::to_string(f) + "].processing_coefficient_per_bs: must be > 0");
    }
  }
  return v;
}

inline void validate(const ScenarioConfig& c)
{
  auto v = config_violations(c);
  if (!v.empty()) throw ValidationError(std::move(v));
}

/// Reference parameters with a single two-NF tactile service.
inline ScenarioConfig default_config()
{
  ScenarioConfig c;
  ServiceSpec tactile;
  tactile.service_id = "tactile";
  tactile.e2e_delay_max = 1e-3;
  tactile.payload_bits = 500.0;
  tactile.chain = {NfSpec{"firewall", {1e-5, 1.25e-5}}, NfSpec{"haptic-codec", {2e-5, 2.5e-5}}};
  c.services = {tactile};
  return c;
}

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct BaseStation {
  Point position;
  double max_power = 0.0;        // W (DL budget, C4)
  double processing_rate = 0.0;  // bit/s (Omega)
  bool operator==(const BaseStation&) const = default;
};

struct User {
  std::size_t bs = 0;
  std::size_t service = 0;
  Point position;
  double max_power = 0.0;  // W (C3)
  std::size_t teleoperator = npos;
  bool operator==(const User&) const = default;
};

struct Teleoperator {
  std::size_t bs = 0;
  Point position;
  std::size_t user = npos;
  bool operator==(const Teleoperator&) const = default;
};

/// Dense (a, b, c) array, row-major with the last index fastest.
struct Grid3 {
  std::size_t n0 = 0, n1 = 0, n2 = 0;
  std::vector<double> data;

  Grid3() = default;
  Grid3(std::size_t a, std::size_t b, std::size_t c, double fill = 0.0)
      : n0(a), n1(b), n2(c), data(a * b * c, fill)
  {
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data[(i * n1 + j) * n2 + k]; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const { return data[(i * n1 + j) * n2 + k]; }
  bool operator==(const Grid3&) const = default;
};

/// One frame of the network. BS 0 is the macro cell.
struct Scenario {
  ScenarioConfig config;
  std::vector<BaseStation> bs;
  std::vector<User> users;
  std::vector<Teleoperator> teleoperators;
  Grid3 gain_ul;  // (user, bs, ul subcarrier): user -> BS
  Grid3 gain_dl;  // (teleoperator, bs, dl subcarrier): BS -> teleoperator
  std::vector<std::vector<double>> backhaul;  // Psi[n1][n2], diagonal unused
  double noise_ul = 0.0;  // W per UL subcarrier
  double noise_dl = 0.0;  // W per DL subcarrier

  std::size_t num_bs() const { return bs.size(); }
  std::size_t num_users() const { return users.size(); }
  std::size_t num_teleoperators() const { return teleoperators.size(); }
  std::size_t num_ul() const { return gain_ul.n2; }
  std::size_t num_dl() const { return gain_dl.n2; }
  double ul_bandwidth() const { return config.ul_subcarrier_bandwidth(); }
  double dl_bandwidth() const { return config.dl_subcarrier_bandwidth(); }

  const ServiceSpec& service_of(std::size_t u) const { return config.services[users[u].service]; }
  double payload(std::size_t u) const { return service_of(u).payload_bits; }
  double deadline(std::size_t u) const { return service_of(u).e2e_delay_max; }

  std::vector<std::size_t> users_at(std::size_t j) const
  {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < users.size(); ++u)
      if (users[u].bs == j) out.push_back(u);
    return out;
  }

  std::vector<std::size_t> teleoperators_at(std::size_t j) const
  {
    std::vector<std::size_t> out;
    for (std::size_t o = 0; o < teleoperators.size(); ++o)
      if (teleoperators[o].bs == j) out.push_back(o);
    return out;
  }

  bool operator==(const Scenario&) const = default;
};

/// Every violated scenario invariant, empty when consistent.
inline std::vector<std::string> scenario_violations(const Scenario& s)
{
  auto v = config_violations(s.config);
  const std::size_t J = s.bs.size();
  if (J == 0) v.push_back("bs: at least the macro BS is required");
  if (s.gain_ul.n0 != s.users.size() || s.gain_ul.n1 != J)
    v.push_back("gain_ul: shape must be users x BSs x UL subcarriers");
  if (s.gain_dl.n0 != s.teleoperators.size() || s.gain_dl.n1 != J)
    v.push_back("gain_dl: shape must be teleoperators x BSs x DL subcarriers");
  for (double g : s.gain_ul.data)
    if (!(g >= 0.0) || !std::isfinite(g)) { v.push_back("gain_ul: gains must be finite and >= 0"); break; }
  for (double g : s.gain_dl.data)
    if (!(g >= 0.0) || !std::isfinite(g)) { v.push_back("gain_dl: gains must be finite and >= 0"); break; }
  if (!(s.noise_ul > 0.0) || !(s.noise_dl > 0.0)) v.push_back("noise: per-subcarrier noise must be > 0");
  for (std::size_t j = 0; j < J; ++j) {
    if (!(s.bs[j].max_power > 0.0)) v.push_back("bs[" + std::to_string(j) + "].max_power: must be > 0");
    if (!(s.bs[j].processing_rate > 0.0))
      v.push_back("bs[" + std::to_string(j) + "].processing_rate: must be > 0");
  }
  if (s.backhaul.size() != J) v.push_back("backhaul: must be a BSs x BSs matrix");
  for (std::size_t a = 0; a < s.backhaul.size() && a < J; ++a) {
    if (s.backhaul[a].size() != J) { v.push_back("backhaul: must be a BSs x BSs matrix"); break; }
    for (std::size_t b = 0; b < J; ++b)
      if (a != b && (!(s.backhaul[a][b] > 0.0) || s.backhaul[a][b] != s.backhaul[b][a]))
        v.push_back("backhaul[" + std::to_string(a) + "][" + std::to_string(b) + "]: must be symmetric and > 0");
  }
  for (std::size_t u = 0; u < s.users.size(); ++u) {
    const auto& usr = s.users[u];
    const std::string p = "users[" + std::to_string(u) + "].";
    if (usr.bs >= J) v.push_back(p + "bs: out of range");
    if (usr.service >= s.config.services.size()) v.push_back(p + "service: out of range");
    if (!(usr.max_power > 0.0)) v.push_back(p + "max_power: must be > 0");
    if (usr.teleoperator != npos) {
      if (usr.teleoperator >= s.teleoperators.size() || s.teleoperators[usr.teleoperator].user != u)
        v.push_back(p + "teleoperator: pairing must be a partial injection");
    }
  }
  for (std::size_t o = 0; o < s.teleoperators.size(); ++o) {
    const auto& t = s.teleoperators[o];
    if (t.bs >= J) v.push_back("teleoperators[" + std::to_string(o) + "].bs: out of range");
    if (t.user != npos && (t.user >= s.users.size() || s.users[t.user].teleoperator != o))
      v.push_back("teleoperators[" + std::to_string(o) + "].user: pairing must be a partial injection");
  }
  return v;
}

inline void validate(const Scenario& s)
{
  auto v = scenario_violations(s);
  if (!v.empty()) throw ValidationError(std::move(v));
}

/// Path-loss power gain d^-alpha scaled by a fading power sample. Distances
/// are in metres and clamped to 1 m.
inline double channel_gain(double fading_power, double distance_m, double alpha)
{
  return fading_power * std::pow(std::max(distance_m, 1.0), -alpha);
}

namespace detail {
enum StreamTag : std::uint64_t { kUserPos = 1, kTeleBs, kTelePos, kFadingUl, kFadingDl };

// Uniform over the disc of radius r around c.
inline Point point_in_disc(Rng& rng, Point c, double r)
{
  const double rho = r * std::sqrt(rng.uniform());
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  return {c.x + rho * std::cos(phi), c.y + rho * std::sin(phi)};
}
}  // namespace detail

/// Draws one frame. Positions are in metres on a square of the configured
/// area with the MBS at the centre and the SBSs on a circle of radius side/4.
/// Users and teleoperators fall uniformly in a disc of radius side/8 around
/// their BS, so neighbouring cells do not overlap.
/// Each user is keyed by (BS, service, index), so a larger population or more
/// subcarriers extends, rather than reshuffles, a smaller one.
inline Scenario generate(const ScenarioConfig& config, std::uint64_t seed)
{
  validate(config);
  Scenario s;
  s.config = config;
  const std::size_t J = config.num_bs();
  const std::size_t K = config.num_ul_subcarriers;
  const std::size_t L = config.num_dl_subcarriers;
  const double side = std::sqrt(config.coverage_area) * 1000.0;
  const double cell_radius = side / 8;

  s.bs.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    auto& b = s.bs[j];
    if (j == 0) {
      b.position = {0.0, 0.0};
      b.max_power = dbm_to_watts(config.max_power_mbs);
    } else {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(j - 1) / static_cast<double>(config.num_sbs);
      b.position = {side / 4 * std::cos(angle), side / 4 * std::sin(angle)};
      b.max_power = dbm_to_watts(config.max_power_sbs);
    }
    b.processing_rate = config.processing_rate_at(j);
  }

  struct Key { std::uint64_t j, svc, i; };
  std::vector<Key> keys;
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t svc = 0; svc < config.services.size(); ++svc)
      for (std::size_t i = 0; i < config.users_per_bs_per_service; ++i) {
        keys.push_back({j, svc, i});
        User u;
        u.bs = j;
        u.service = svc;
        u.max_power = dbm_to_watts(config.max_power_user);
        auto pos_rng = Rng::stream(seed, {detail::kUserPos, j, svc, i});
        u.position = detail::point_in_disc(pos_rng, s.bs[j].position, cell_radius);
        u.teleoperator = s.users.size();
        s.users.push_back(u);

        Teleoperator t;
        auto bs_rng = Rng::stream(seed, {detail::kTeleBs, j, svc, i});
        t.bs = static_cast<std::size_t>(bs_rng.below(J));
        auto tpos_rng = Rng::stream(seed, {detail::kTelePos, j, svc, i});
        t.position = detail::point_in_disc(tpos_rng, s.bs[t.bs].position, cell_radius);
        t.user = u.teleoperator;
        s.teleoperators.push_back(t);
      }

  const std::size_t U = s.users.size();
  s.gain_ul = Grid3(U, J, K);
  s.gain_dl = Grid3(U, J, L);
  for (std::size_t u = 0; u < U; ++u) {
    const auto& key = keys[u];
    for (std::size_t m = 0; m < J; ++m) {
      auto ul = Rng::stream(seed, {detail::kFadingUl, key.j, key.svc, key.i, m});
      const double d_ul = distance(s.users[u].position, s.bs[m].position);
      for (std::size_t k = 0; k < K; ++k)
        s.gain_ul(u, m, k) = channel_gain(ul.exponential(), d_ul, config.pathloss_exponent);
      auto dl = Rng::stream(seed, {detail::kFadingDl, key.j, key.svc, key.i, m});
      const double d_dl = distance(s.teleoperators[u].position, s.bs[m].position);
      for (std::size_t l = 0; l < L; ++l)
        s.gain_dl(u, m, l) = channel_gain(dl.exponential(), d_dl, config.pathloss_exponent);
    }
  }

  s.backhaul.assign(J, std::vector<double>(J, config.backhaul_capacity));
  s.noise_ul = noise_power_watts(config.noise_psd, config.ul_subcarrier_bandwidth());
  s.noise_dl = noise_power_watts(config.noise_psd, config.dl_subcarrier_bandwidth());
  return s;
}

}  // namespace tinfv
