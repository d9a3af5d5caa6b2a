#pragma once

// Seeded sweeps over one scenario parameter, with a tabular and a structured
// (JSON) result format.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "tinfv/scenario.hpp"
#include "tinfv/scenario_io.hpp"
#include "tinfv/solver.hpp"

namespace tinfv {

enum class Axis { users_per_bs, num_subcarriers, e2e_delay, num_bs };
enum class Mode { ja, sa, both };
enum class TableFormat { table, structured };

inline const char* to_string(Axis a)
{
  switch (a) {
    case Axis::users_per_bs: return "users_per_bs";
    case Axis::num_subcarriers: return "num_subcarriers";
    case Axis::e2e_delay: return "e2e_delay";
    case Axis::num_bs: return "num_bs";
  }
  return "?";
}

inline const char* to_string(Mode m)
{
  switch (m) {
    case Mode::ja: return "ja";
    case Mode::sa: return "sa";
    case Mode::both: return "both";
  }
  return "?";
}

inline Axis parse_axis(const std::string& s)
{
  for (Axis a : {Axis::users_per_bs, Axis::num_subcarriers, Axis::e2e_delay, Axis::num_bs})
    if (s == to_string(a)) return a;
  throw std::invalid_argument("unknown axis '" + s + "'");
}

inline Mode parse_mode(const std::string& s)
{
  for (Mode m : {Mode::ja, Mode::sa, Mode::both})
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

struct SweepSpec {
  Axis axis = Axis::users_per_bs;
  std::vector<double> values;  // e2e_delay in ms, the other axes are counts
  Mode mode = Mode::ja;
  std::vector<std::uint64_t> seeds{1};
  ScenarioConfig base = default_config();
  std::string config_path;  // informational
  std::string output_path;
  SolverSettings settings;
  double nfv_carve_out = kDefaultNfvCarveOut;  // s, SA mode
  unsigned workers = 1;
  bool timing = true;  // false zeroes wall_ms so repeated sweeps are byte-identical

  std::size_t ensemble_size() const { return seeds.size(); }
};

/// Config for one sweep point. The subcarrier axis keeps the total
/// bandwidths and sets L = 2K.
inline ScenarioConfig apply_axis(ScenarioConfig c, Axis axis, double v)
{
  auto count = [&](const char* what) {
    if (!(v >= 1.0) || v != std::floor(v)) throw std::invalid_argument(std::string(what) + ": value must be a positive integer");
    return static_cast<std::size_t>(v);
  };
  switch (axis) {
    case Axis::users_per_bs: c.users_per_bs_per_service = count("users_per_bs"); break;
    case Axis::num_subcarriers:
      c.num_ul_subcarriers = count("num_subcarriers");
      c.num_dl_subcarriers = 2 * c.num_ul_subcarriers;
      break;
    case Axis::e2e_delay:
      if (!(v > 0.0)) throw std::invalid_argument("e2e_delay: value must be > 0 ms");
      for (auto& s : c.services) s.e2e_delay_max = ms_to_seconds(v);
      break;
    case Axis::num_bs: c.num_sbs = count("num_bs") - 1; break;
  }
  return c;
}

inline std::vector<std::string> sweep_violations(const SweepSpec& s)
{
  std::vector<std::string> v;
  if (s.values.empty()) v.push_back("values: must not be empty");
  if (s.seeds.empty()) v.push_back("seeds: ensemble must hold at least one seed");
  if (s.workers < 1) v.push_back("workers: must be >= 1");
  for (const auto& e : s.settings.violations()) v.push_back("settings." + e);
  for (double x : s.values) {
    try {
      for (const auto& e : config_violations(apply_axis(s.base, s.axis, x)))
        v.push_back(std::string(to_string(s.axis)) + "=" + std::to_string(x) + ": " + e);
    } catch (const std::invalid_argument& e) {
      v.push_back(e.what());
    }
  }
  return v;
}

inline void validate(const SweepSpec& s)
{
  auto v = sweep_violations(s);
  if (!v.empty()) throw ValidationError(std::move(v));
}

struct ResultRow {
  double axis_value = 0.0;
  Mode mode = Mode::ja;
  std::uint64_t seed = 0;
  double cost = 0.0;
  double power_cost = 0.0;
  double exec_cost = 0.0;
  bool feasible = false;
  int iterations = 0;
  double wall_ms = 0.0;
  // Run detail, carried by the structured format only.
  std::vector<double> cost_trace;
  std::vector<std::vector<double>> sca_traces;
  SolverCounters counters;
  std::vector<ConstraintCheck> checks;
  std::vector<std::string> diagnostics;

  bool operator==(const ResultRow& o) const
  {
    return axis_value == o.axis_value && mode == o.mode && seed == o.seed && cost == o.cost &&
           power_cost == o.power_cost && exec_cost == o.exec_cost && feasible == o.feasible &&
           iterations == o.iterations && wall_ms == o.wall_ms && cost_trace == o.cost_trace &&
           sca_traces == o.sca_traces && counters.subcarrier_ops == o.counters.subcarrier_ops &&
           counters.sca_iterations == o.counters.sca_iterations && counters.nfv_ops == o.counters.nfv_ops &&
           counters.delay_constraints == o.counters.delay_constraints && checks == o.checks &&
           diagnostics == o.diagnostics;
  }
};

struct ResultTable {
  Axis axis = Axis::users_per_bs;
  std::vector<ResultRow> rows;
  bool operator==(const ResultTable&) const = default;
};

inline ResultRow make_row(double axis_value, Mode mode, std::uint64_t seed, const RunResult& r, bool timing)
{
  ResultRow row;
  row.axis_value = axis_value;
  row.mode = mode;
  row.seed = seed;
  row.cost = r.cost;
  row.power_cost = r.power_cost;
  row.exec_cost = r.exec_cost;
  row.feasible = r.feasible;
  row.iterations = r.iterations;
  row.wall_ms = timing ? r.wall_ms : 0.0;
  row.cost_trace = r.cost_trace;
  row.sca_traces = r.sca_traces;
  row.counters = r.counters;
  row.checks = r.report.checks;
  row.diagnostics = r.diagnostics;
  return row;
}

/// Runs every (value, mode, seed) point; rows come out ordered by value, then
/// mode (ja before sa), then seed, whatever the worker count.
inline ResultTable run_sweep(const SweepSpec& spec)
{
  validate(spec);
  struct Point {
    double value;
    Mode mode;
    std::uint64_t seed;
  };
  std::vector<Point> points;
  const std::vector<Mode> modes = spec.mode == Mode::both ? std::vector<Mode>{Mode::ja, Mode::sa} : std::vector<Mode>{spec.mode};
  for (double v : spec.values)
    for (Mode m : modes)
      for (std::uint64_t s : spec.seeds) points.push_back({v, m, s});
  std::stable_sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
    return std::make_tuple(a.value, static_cast<int>(a.mode), a.seed) < std::make_tuple(b.value, static_cast<int>(b.mode), b.seed);
  });

  ResultTable table;
  table.axis = spec.axis;
  table.rows.resize(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const auto& p = points[i];
      RunResult r;
      try {
        const auto scn = generate(apply_axis(spec.base, spec.axis, p.value), p.seed);
        r = p.mode == Mode::ja ? solve_joint(scn, spec.settings) : solve_separate(scn, spec.settings, spec.nfv_carve_out);
      } catch (const std::exception& e) {
        r = RunResult{};
        r.diagnostics.push_back(std::string("solver error: ") + e.what());
      }
      table.rows[i] = make_row(p.value, p.mode, p.seed, r, spec.timing);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(spec.workers, static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return table;
}

namespace exp_detail {
// JSON has no infinities; non-finite values travel as strings.
inline Json jnum(double x)
{
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

inline double from_jnum(const Json& j)
{
  if (!j.is_string()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  throw std::invalid_argument("bad number '" + s + "'");
}

inline Json jvec(const std::vector<double>& v)
{
  Json a = Json::array();
  for (double x : v) a.push_back(jnum(x));
  return a;
}

inline std::vector<double> from_jvec(const Json& j)
{
  std::vector<double> v;
  for (const auto& x : j) v.push_back(from_jnum(x));
  return v;
}

inline std::string num(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace exp_detail

inline constexpr const char* kTableHeader = "axis\tmode\tseed\tcost\tpower_cost\texec_cost\tfeasible\titers\twall_ms";

/// Tab-separated, one header line then one line per row.
inline void write_table(const ResultTable& t, std::ostream& out)
{
  using exp_detail::num;
  out << kTableHeader << '\n';
  for (const auto& r : t.rows)
    out << num(r.axis_value) << '\t' << to_string(r.mode) << '\t' << r.seed << '\t' << num(r.cost) << '\t'
        << num(r.power_cost) << '\t' << num(r.exec_cost) << '\t' << (r.feasible ? 1 : 0) << '\t' << r.iterations
        << '\t' << num(r.wall_ms) << '\n';
}

inline Json to_json(const ResultRow& r)
{
  using namespace exp_detail;
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"worst_residual", jnum(c.worst_residual)}, {"detail", c.detail}});
  Json sca = Json::array();
  for (const auto& tr : r.sca_traces) sca.push_back(jvec(tr));
  return Json{{"axis", r.axis_value},
              {"mode", to_string(r.mode)},
              {"seed", r.seed},
              {"cost", jnum(r.cost)},
              {"power_cost", jnum(r.power_cost)},
              {"exec_cost", jnum(r.exec_cost)},
              {"feasible", r.feasible},
              {"iters", r.iterations},
              {"wall_ms", r.wall_ms},
              {"cost_trace", jvec(r.cost_trace)},
              {"sca_traces", sca},
              {"counters",
               {{"subcarrier_ops", r.counters.subcarrier_ops},
                {"sca_iterations", r.counters.sca_iterations},
                {"nfv_ops", r.counters.nfv_ops},
                {"delay_constraints", r.counters.delay_constraints}}},
              {"checks", checks},
              {"diagnostics", r.diagnostics}};
}

inline Json to_json(const ResultTable& t)
{
  Json rows = Json::array();
  for (const auto& r : t.rows) rows.push_back(to_json(r));
  return Json{{"axis", to_string(t.axis)}, {"rows", rows}};
}

inline ResultTable table_from_json(const Json& j)
{
  ResultTable t;
  try {
    io_detail::reject_unknown(j, {"axis", "rows"}, "");
    t.axis = parse_axis(j.at("axis").get<std::string>());
    for (const auto& x : j.at("rows")) {
      ResultRow r;
      r.axis_value = x.at("axis").get<double>();
      r.mode = parse_mode(x.at("mode").get<std::string>());
      r.seed = x.at("seed").get<std::uint64_t>();
      r.cost = exp_detail::from_jnum(x.at("cost"));
      r.power_cost = exp_detail::from_jnum(x.at("power_cost"));
      r.exec_cost = exp_detail::from_jnum(x.at("exec_cost"));
      r.feasible = x.at("feasible").get<bool>();
      r.iterations = x.at("iters").get<int>();
      r.wall_ms = x.at("wall_ms").get<double>();
      r.cost_trace = exp_detail::from_jvec(x.at("cost_trace"));
      for (const auto& tr : x.at("sca_traces")) r.sca_traces.push_back(exp_detail::from_jvec(tr));
      const auto& c = x.at("counters");
      r.counters.subcarrier_ops = c.at("subcarrier_ops").get<std::uint64_t>();
      r.counters.sca_iterations = c.at("sca_iterations").get<std::uint64_t>();
      r.counters.nfv_ops = c.at("nfv_ops").get<std::uint64_t>();
      r.counters.delay_constraints = c.at("delay_constraints").get<std::uint64_t>();
      for (const auto& k : x.at("checks"))
        r.checks.push_back({k.at("name").get<std::string>(), k.at("passed").get<bool>(),
                            exp_detail::from_jnum(k.at("worst_residual")), k.at("detail").get<std::string>()});
      r.diagnostics = x.at("diagnostics").get<std::vector<std::string>>();
      t.rows.push_back(std::move(r));
    }
  } catch (const Json::exception& e) {
    throw FormatError(std::string("result document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("result document: ") + e.what());
  }
  return t;
}

/// Full run record: costs, traces, constraint report and the allocation. The
/// NF schedule is a list of (user, nf, bs, start, end) executions.
inline Json to_json(const RunResult& r)
{
  using namespace exp_detail;
  const auto& a = r.allocation;
  auto link = [](const auto& x) {
    return Json{{"rows", x.rows}, {"cols", x.cols}, {"assign", x.assign}, {"power", jvec(x.power)}};
  };
  Json sched = Json::array();
  for (const auto& e : a.nfv.executions()) sched.push_back({e.user, e.nf, e.bs, e.start, e.end});
  Json delays = Json::array();
  for (const auto& d : a.delays)
    delays.push_back({{"t_ul", d.t_ul}, {"t_dl", d.t_dl}, {"q_ul", d.q_ul}, {"q_dl", d.q_dl}, {"nfs", d.nfs}, {"cap", d.cap}});
  ResultRow row = make_row(0.0, Mode::ja, 0, r, true);
  Json j = to_json(row);
  for (const char* k : {"axis", "mode", "seed"}) j.erase(k);
  j["allocation"] = {{"ul", link(a.ul)}, {"dl", link(a.dl)}, {"nfv", sched}, {"delays", delays}};
  return j;
}

inline void write_structured(const ResultTable& t, std::ostream& out) { out << to_json(t).dump(2) << '\n'; }

inline ResultTable parse_structured(const std::string& text, const std::string& origin = "<results>")
{
  return table_from_json(io_detail::parse_text(text, origin));
}

inline void emit(const ResultTable& t, TableFormat f, std::ostream& out)
{
  if (f == TableFormat::table) write_table(t, out);
  else write_structured(t, out);
}

inline void emit(const ResultTable& t, TableFormat f, const std::string& path)
{
  std::ostringstream ss;
  emit(t, f, ss);
  io_detail::write_file(path, ss.str());
}

/// Mean of a column over the rows with the given axis value and mode.
/// Infeasible rows are included at their recorded cost.
inline double mean_cost(const ResultTable& t, double axis_value, Mode mode)
{
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& r : t.rows)
    if (r.axis_value == axis_value && r.mode == mode) s += r.cost, ++n;
  return n ? s / static_cast<double>(n) : 0.0;
}

}  // namespace tinfv
