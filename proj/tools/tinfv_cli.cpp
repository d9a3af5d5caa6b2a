// Command-line front end: scenario generation, single solves, sweeps, the
// enumeration oracle and config validation.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tinfv/tinfv.hpp"

namespace {

using namespace tinfv;

std::vector<std::uint64_t> parse_seed_range(const std::string& s)
{
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) return {std::stoull(s)};
    const auto lo = std::stoull(s.substr(0, dots)), hi = std::stoull(s.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("empty range");
    std::vector<std::uint64_t> out;
    for (auto x = lo; x <= hi; ++x) out.push_back(x);
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("--seeds expects N or N..M, got '" + s + "'");
  }
}

std::vector<double> parse_values(const std::string& s)
{
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("--values expects comma-separated numbers, got '" + item + "'");
    }
  }
  return out;
}

void write_out(const std::string& path, const std::string& text)
{
  if (path.empty() || path == "-") std::cout << text;
  else io_detail::write_file(path, text);
}

TableFormat parse_format(const std::string& f) { return f == "structured" ? TableFormat::structured : TableFormat::table; }

struct Common {
  std::string config;
  std::string out;
  std::string format = "table";
  std::uint64_t seed = 1;
  std::string seeds;
  std::string mode = "ja";
  unsigned workers = 1;
  bool no_timing = false;

  ScenarioConfig load() const { return config.empty() ? default_config() : load_config(config); }
  std::vector<std::uint64_t> seed_list() const { return seeds.empty() ? std::vector<std::uint64_t>{seed} : parse_seed_range(seeds); }
};

int run(int argc, char** argv)
{
  CLI::App app{"Joint radio and NFV resource allocation for tactile services"};
  app.require_subcommand(1);
  Common c;
  std::string axis = "users_per_bs", values, scenario_path;

  auto* gen = app.add_subcommand("generate", "Generate a scenario and write it as JSON");
  auto* solve = app.add_subcommand("solve", "Solve one generated scenario");
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter over a seeded ensemble");
  auto* oracle = app.add_subcommand("oracle", "Compare the solver with the enumeration lower bound on tiny instances");
  auto* val = app.add_subcommand("validate", "Validate a config (and optionally a scenario dump)");

  for (auto* sub : {gen, solve, sweep, oracle, val}) sub->add_option("--config", c.config, "Scenario config (JSON)");
  for (auto* sub : {gen, solve, oracle}) sub->add_option("--seed", c.seed, "Scenario seed");
  for (auto* sub : {gen, solve, sweep, oracle}) sub->add_option("--out", c.out, "Output path (default stdout)");
  for (auto* sub : {solve, sweep}) {
    sub->add_option("--mode", c.mode, "ja | sa | both")->check(CLI::IsMember({"ja", "sa", "both"}));
    sub->add_option("--format", c.format, "table | structured")->check(CLI::IsMember({"table", "structured"}));
    sub->add_flag("--no-timing", c.no_timing, "Write wall_ms as 0 for byte-identical reruns");
  }
  for (auto* sub : {sweep, oracle}) sub->add_option("--seeds", c.seeds, "Seed range N..M");
  sweep->add_option("--axis", axis, "users_per_bs | num_subcarriers | e2e_delay | num_bs")
      ->check(CLI::IsMember({"users_per_bs", "num_subcarriers", "e2e_delay", "num_bs"}));
  sweep->add_option("--values", values, "Comma-separated axis values (e2e_delay in ms)")->required();
  sweep->add_option("--workers", c.workers, "Concurrent sweep points")->check(CLI::PositiveNumber);
  val->add_option("--scenario", scenario_path, "Scenario dump to validate");

  CLI11_PARSE(app, argc, argv);

  if (*gen) {
    write_out(c.out, to_json(generate(c.load(), c.seed)).dump(2) + "\n");
    return 0;
  }

  if (*solve) {
    const auto scn = generate(c.load(), c.seed);
    const Mode mode = parse_mode(c.mode);
    ResultTable t;
    Json runs = Json::array();
    for (Mode m : mode == Mode::both ? std::vector<Mode>{Mode::ja, Mode::sa} : std::vector<Mode>{mode}) {
      const auto r = m == Mode::ja ? solve_joint(scn) : solve_separate(scn);
      t.rows.push_back(make_row(static_cast<double>(scn.config.users_per_bs_per_service), m, c.seed, r, !c.no_timing));
      Json j = to_json(r);
      if (c.no_timing) j["wall_ms"] = 0.0;
      runs.push_back({{"mode", to_string(m)}, {"seed", c.seed}, {"result", j}});
    }
    if (parse_format(c.format) == TableFormat::structured) {
      write_out(c.out, runs.dump(2) + "\n");
    } else {
      std::ostringstream ss;
      write_table(t, ss);
      write_out(c.out, ss.str());
    }
    return 0;
  }

  if (*sweep) {
    SweepSpec spec;
    spec.axis = parse_axis(axis);
    spec.values = parse_values(values);
    spec.mode = parse_mode(c.mode);
    spec.seeds = c.seed_list();
    spec.base = c.load();
    spec.config_path = c.config;
    spec.output_path = c.out;
    spec.workers = c.workers;
    spec.timing = !c.no_timing;
    const auto table = run_sweep(spec);
    std::ostringstream ss;
    emit(table, parse_format(c.format), ss);
    write_out(c.out, ss.str());
    return 0;
  }

  if (*oracle) {
    const auto cfg = c.config.empty() ? tiny_config() : load_config(c.config);
    std::ostringstream ss;
    ss << "seed\toracle_feasible\toracle_cost\tcandidates\tsolver_feasible\tchecker_ok\tsolver_cost\tratio\n";
    for (auto seed : c.seed_list()) {
      const auto r = run_oracle_comparison(cfg, seed);
      char line[256];
      std::snprintf(line, sizeof line, "%llu\t%d\t%.6g\t%llu\t%d\t%d\t%.6g\t%.4f\n", static_cast<unsigned long long>(seed),
                    r.oracle.feasible, r.oracle.cost, static_cast<unsigned long long>(r.oracle.candidates),
                    r.heuristic.feasible, r.heuristic_passes_checker, r.heuristic.cost, r.gap());
      ss << line;
    }
    write_out(c.out, ss.str());
    return 0;
  }

  if (*val) {
    c.load();
    if (!scenario_path.empty()) load_scenario(scenario_path);
    std::cout << "ok\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
