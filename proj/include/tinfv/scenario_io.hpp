#pragma once

// JSON persistence for configurations and generated scenarios. Unknown keys
// are rejected; parse and type errors name the offending line or field.

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tinfv/scenario.hpp"

namespace tinfv {

using Json = nlohmann::json;

/// Unreadable file, malformed document or a field of the wrong shape.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace io_detail {

inline void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where)
{
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw FormatError(where + (where.empty() ? "" : ".") + key + ": unknown key");
}

template <class T>
T field(const Json& j, const std::string& key, const std::string& where)
{
  const std::string path = where.empty() ? key : where + "." + key;
  if (!j.contains(key)) throw FormatError(path + ": missing");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

template <class T>
void optional_field(const Json& j, const std::string& key, const std::string& where, T& out)
{
  if (j.contains(key)) out = field<T>(j, key, where);
}

inline std::string line_col(const std::string& text, std::size_t byte)
{
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line, col = 1;
    else ++col;
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

inline Json parse_text(const std::string& text, const std::string& origin)
{
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(origin + ":" + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path)
{
  if (!std::filesystem::exists(path)) throw FormatError(path + ": file not found");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open for writing");
  out << text;
  if (!out) throw FormatError(path + ": write failed");
}

}  // namespace io_detail

inline Json to_json(const NfSpec& nf)
{
  return Json{{"nf_id", nf.nf_id}, {"processing_coefficient_per_bs", nf.processing_coefficient_per_bs}};
}

inline Json to_json(const ServiceSpec& s)
{
  Json chain = Json::array();
  for (const auto& nf : s.chain) chain.push_back(to_json(nf));
  return Json{{"service_id", s.service_id},
              {"e2e_delay_max", s.e2e_delay_max},
              {"payload_bits", s.payload_bits},
              {"chain", chain}};
}

inline Json to_json(const ScenarioConfig& c)
{
  Json services = Json::array();
  for (const auto& s : c.services) services.push_back(to_json(s));
  return Json{{"num_sbs", c.num_sbs},
              {"coverage_area", c.coverage_area},
              {"num_ul_subcarriers", c.num_ul_subcarriers},
              {"num_dl_subcarriers", c.num_dl_subcarriers},
              {"ul_bandwidth", c.ul_bandwidth},
              {"dl_bandwidth", c.dl_bandwidth},
              {"noise_psd", c.noise_psd},
              {"pathloss_exponent", c.pathloss_exponent},
              {"qos_exponent_ul", c.qos_exponent_ul},
              {"qos_exponent_dl", c.qos_exponent_dl},
              {"violation_prob_ul", c.violation_prob_ul},
              {"violation_prob_dl", c.violation_prob_dl},
              {"nonempty_buffer_prob_ul", c.nonempty_buffer_prob_ul},
              {"nonempty_buffer_prob_dl", c.nonempty_buffer_prob_dl},
              {"max_power_mbs", c.max_power_mbs},
              {"max_power_sbs", c.max_power_sbs},
              {"max_power_user", c.max_power_user},
              {"cost_weight_power", c.cost_weight_power},
              {"cost_weight_exec", c.cost_weight_exec},
              {"services", services},
              {"users_per_bs_per_service", c.users_per_bs_per_service},
              {"backhaul_capacity", c.backhaul_capacity},
              {"processing_rate", c.processing_rate},
              {"rng_seed", c.rng_seed}};
}

inline NfSpec nf_from_json(const Json& j, const std::string& where)
{
  io_detail::reject_unknown(j, {"nf_id", "processing_coefficient_per_bs"}, where);
  NfSpec nf;
  nf.nf_id = io_detail::field<std::string>(j, "nf_id", where);
  nf.processing_coefficient_per_bs = io_detail::field<std::vector<double>>(j, "processing_coefficient_per_bs", where);
  return nf;
}

inline ServiceSpec service_from_json(const Json& j, const std::string& where)
{
  io_detail::reject_unknown(j, {"service_id", "e2e_delay_max", "payload_bits", "chain"}, where);
  ServiceSpec s;
  s.service_id = io_detail::field<std::string>(j, "service_id", where);
  s.e2e_delay_max = io_detail::field<double>(j, "e2e_delay_max", where);
  s.payload_bits = io_detail::field<double>(j, "payload_bits", where);
  const auto& chain = j.contains("chain") ? j.at("chain") : Json();
  if (!chain.is_array()) throw FormatError(where + ".chain: expected an array");
  for (std::size_t i = 0; i < chain.size(); ++i)
    s.chain.push_back(nf_from_json(chain[i], where + ".chain[" + std::to_string(i) + "]"));
  return s;
}

/// Missing keys keep their defaults; `services`, when present, replaces the
/// default service list. The result is validated.
inline ScenarioConfig config_from_json(const Json& j)
{
  io_detail::reject_unknown(
      j,
      {"num_sbs", "coverage_area", "num_ul_subcarriers", "num_dl_subcarriers", "ul_bandwidth", "dl_bandwidth",
       "noise_psd", "pathloss_exponent", "qos_exponent_ul", "qos_exponent_dl", "violation_prob_ul",
       "violation_prob_dl", "nonempty_buffer_prob_ul", "nonempty_buffer_prob_dl", "max_power_mbs", "max_power_sbs",
       "max_power_user", "cost_weight_power", "cost_weight_exec", "services", "users_per_bs_per_service",
       "backhaul_capacity", "processing_rate", "rng_seed"},
      "");
  ScenarioConfig c = default_config();
  using io_detail::optional_field;
  optional_field(j, "num_sbs", "", c.num_sbs);
  optional_field(j, "coverage_area", "", c.coverage_area);
  optional_field(j, "num_ul_subcarriers", "", c.num_ul_subcarriers);
  optional_field(j, "num_dl_subcarriers", "", c.num_dl_subcarriers);
  optional_field(j, "ul_bandwidth", "", c.ul_bandwidth);
  optional_field(j, "dl_bandwidth", "", c.dl_bandwidth);
  optional_field(j, "noise_psd", "", c.noise_psd);
  optional_field(j, "pathloss_exponent", "", c.pathloss_exponent);
  optional_field(j, "qos_exponent_ul", "", c.qos_exponent_ul);
  optional_field(j, "qos_exponent_dl", "", c.qos_exponent_dl);
  optional_field(j, "violation_prob_ul", "", c.violation_prob_ul);
  optional_field(j, "violation_prob_dl", "", c.violation_prob_dl);
  optional_field(j, "nonempty_buffer_prob_ul", "", c.nonempty_buffer_prob_ul);
  optional_field(j, "nonempty_buffer_prob_dl", "", c.nonempty_buffer_prob_dl);
  optional_field(j, "max_power_mbs", "", c.max_power_mbs);
  optional_field(j, "max_power_sbs", "", c.max_power_sbs);
  optional_field(j, "max_power_user", "", c.max_power_user);
  optional_field(j, "cost_weight_power", "", c.cost_weight_power);
  optional_field(j, "cost_weight_exec", "", c.cost_weight_exec);
  optional_field(j, "users_per_bs_per_service", "", c.users_per_bs_per_service);
  optional_field(j, "backhaul_capacity", "", c.backhaul_capacity);
  optional_field(j, "processing_rate", "", c.processing_rate);
  optional_field(j, "rng_seed", "", c.rng_seed);
  if (j.contains("services")) {
    const auto& arr = j.at("services");
    if (!arr.is_array()) throw FormatError("services: expected an array");
    c.services.clear();
    for (std::size_t i = 0; i < arr.size(); ++i)
      c.services.push_back(service_from_json(arr[i], "services[" + std::to_string(i) + "]"));
  }
  validate(c);
  return c;
}

inline ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<config>")
{
  return config_from_json(io_detail::parse_text(text, origin));
}

inline ScenarioConfig load_config(const std::string& path) { return parse_config(io_detail::read_file(path), path); }

inline void save_config(const ScenarioConfig& c, const std::string& path)
{
  io_detail::write_file(path, to_json(c).dump(2) + "\n");
}

namespace io_detail {
inline std::size_t index_or_npos(const Json& j) { return j.is_null() ? npos : j.get<std::size_t>(); }
inline Json npos_or_index(std::size_t v) { return v == npos ? Json(nullptr) : Json(v); }
}  // namespace io_detail

/// Full frame dump: the config plus every generated quantity. Gains are flat
/// row-major arrays ordered (row, BS, subcarrier).
inline Json to_json(const Scenario& s)
{
  Json bs = Json::array();
  for (const auto& b : s.bs)
    bs.push_back({{"x", b.position.x}, {"y", b.position.y}, {"max_power", b.max_power}, {"processing_rate", b.processing_rate}});
  Json users = Json::array();
  for (const auto& u : s.users)
    users.push_back({{"bs", u.bs},
                     {"service", u.service},
                     {"x", u.position.x},
                     {"y", u.position.y},
                     {"max_power", u.max_power},
                     {"teleoperator", io_detail::npos_or_index(u.teleoperator)}});
  Json tele = Json::array();
  for (const auto& t : s.teleoperators)
    tele.push_back({{"bs", t.bs}, {"x", t.position.x}, {"y", t.position.y}, {"user", io_detail::npos_or_index(t.user)}});
  return Json{{"config", to_json(s.config)},
              {"bs", bs},
              {"users", users},
              {"teleoperators", tele},
              {"gain_ul", {{"shape", {s.gain_ul.n0, s.gain_ul.n1, s.gain_ul.n2}}, {"data", s.gain_ul.data}}},
              {"gain_dl", {{"shape", {s.gain_dl.n0, s.gain_dl.n1, s.gain_dl.n2}}, {"data", s.gain_dl.data}}},
              {"backhaul", s.backhaul},
              {"noise_ul", s.noise_ul},
              {"noise_dl", s.noise_dl}};
}

inline Scenario scenario_from_json(const Json& j)
{
  using io_detail::field;
  io_detail::reject_unknown(
      j, {"config", "bs", "users", "teleoperators", "gain_ul", "gain_dl", "backhaul", "noise_ul", "noise_dl"}, "");
  Scenario s;
  if (!j.contains("config")) throw FormatError("config: missing");
  s.config = config_from_json(j.at("config"));
  try {
    for (const auto& b : j.at("bs")) {
      io_detail::reject_unknown(b, {"x", "y", "max_power", "processing_rate"}, "bs[]");
      s.bs.push_back({{b.at("x").get<double>(), b.at("y").get<double>()},
                      b.at("max_power").get<double>(),
                      b.at("processing_rate").get<double>()});
    }
    for (const auto& u : j.at("users")) {
      io_detail::reject_unknown(u, {"bs", "service", "x", "y", "max_power", "teleoperator"}, "users[]");
      User usr;
      usr.bs = u.at("bs").get<std::size_t>();
      usr.service = u.at("service").get<std::size_t>();
      usr.position = {u.at("x").get<double>(), u.at("y").get<double>()};
      usr.max_power = u.at("max_power").get<double>();
      usr.teleoperator = io_detail::index_or_npos(u.at("teleoperator"));
      s.users.push_back(usr);
    }
    for (const auto& t : j.at("teleoperators")) {
      io_detail::reject_unknown(t, {"bs", "x", "y", "user"}, "teleoperators[]");
      Teleoperator op;
      op.bs = t.at("bs").get<std::size_t>();
      op.position = {t.at("x").get<double>(), t.at("y").get<double>()};
      op.user = io_detail::index_or_npos(t.at("user"));
      s.teleoperators.push_back(op);
    }
    auto grid = [&](const char* key) {
      const auto& g = j.at(key);
      io_detail::reject_unknown(g, {"shape", "data"}, key);
      const auto shape = g.at("shape").get<std::vector<std::size_t>>();
      if (shape.size() != 3) throw FormatError(std::string(key) + ".shape: expected three extents");
      Grid3 out(shape[0], shape[1], shape[2]);
      out.data = g.at("data").get<std::vector<double>>();
      if (out.data.size() != shape[0] * shape[1] * shape[2])
        throw FormatError(std::string(key) + ".data: length does not match shape");
      return out;
    };
    s.gain_ul = grid("gain_ul");
    s.gain_dl = grid("gain_dl");
    s.backhaul = j.at("backhaul").get<std::vector<std::vector<double>>>();
    s.noise_ul = j.at("noise_ul").get<double>();
    s.noise_dl = j.at("noise_dl").get<double>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("scenario: ") + e.what());
  }
  validate(s);
  return s;
}

inline Scenario load_scenario(const std::string& path)
{
  return scenario_from_json(io_detail::parse_text(io_detail::read_file(path), path));
}

inline void save_scenario(const Scenario& s, const std::string& path)
{
  io_detail::write_file(path, to_json(s).dump(2) + "\n");
}

}  // namespace tinfv
