#include <chrono>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stmon/harness/io.hpp"
#include "stmon/oracle/checks.hpp"

namespace {

using namespace stmon;

// Run outcomes for the streaming monitor; operational failures (bad files,
// malformed options) exit 1 instead.
constexpr int kExitCompleted = 0;
constexpr int kExitViolated = 2;
constexpr int kExitFault = 3;

int status_exit_code(monitor::MonitorStatus s) {
  switch (s) {
    case monitor::MonitorStatus::Completed: return kExitCompleted;
    case monitor::MonitorStatus::ViolatedAlarm: return kExitViolated;
    // A plant that stops answering is indistinguishable from a broken one.
    case monitor::MonitorStatus::Fault:
    case monitor::MonitorStatus::Exhausted: return kExitFault;
  }
  return kExitFault;
}

struct LoadedScenario {
  harness::Scenario scenario;
  stl::StlSpec spec;
};

LoadedScenario load(const std::string &path) {
  LoadedScenario ls;
  ls.scenario = harness::load_scenario(path);
  ls.spec = ls.scenario.parse();
  return ls;
}

template <class B>
feasible::FeasibleTable<B> build_table(const B &bk, const LoadedScenario &ls,
                                       long long *build_ms = nullptr) {
  const auto begun = std::chrono::steady_clock::now();
  auto tab = feasible::compute_feasible_table(bk, ls.spec, feasible::PendingCellMode::Relaxed,
                                              ls.scenario.part_budget);
  if (build_ms)
    *build_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - begun)
                    .count();
  return tab;
}

int cmd_precompute(const std::string &scenario_path, const std::string &out_path) {
  const LoadedScenario ls = load(scenario_path);
  if (ls.scenario.affine) {
    backend::ContinuousBackend bk{*ls.scenario.affine};
    harness::spit_file(out_path, harness::table_to_json_text(build_table(bk, ls)));
  } else {
    backend::GridBackend bk{&*ls.scenario.grid};
    harness::spit_file(out_path, harness::table_to_json_text(build_table(bk, ls)));
  }
  return 0;
}

// The obstacle region drives the forced-observation flags in the report; by
// convention a region named Debris is picked up automatically.
const geom::Region *find_obstacle(const harness::Scenario &sc, std::string &name) {
  if (name.empty()) {
    auto it = sc.regions.find("Debris");
    if (it == sc.regions.end()) return nullptr;
    name = it->first;
    return &it->second;
  }
  auto it = sc.regions.find(name);
  if (it == sc.regions.end()) throw Error("no region named '" + name + "' in the scenario");
  return &it->second;
}

template <class B>
int simulate_with(const B &bk, const LoadedScenario &ls, const stl::Trace &trace,
                  const std::string &out_path, std::string obstacle_name) {
  const geom::Region *obstacle = find_obstacle(ls.scenario, obstacle_name);
  long long build_ms = 0;
  const auto tab = build_table(bk, ls, &build_ms);
  harness::RunReport rep = harness::run_report(bk, ls.spec, ls.scenario.name, ls.scenario.t_max,
                                               trace, tab, obstacle, obstacle_name);
  rep.table.build_ms = build_ms;
  harness::export_report(rep, out_path);
  std::cerr << "self-triggered: " << monitor::status_name(rep.self_log.status) << " with "
            << rep.self_observations() << " observations; periodic: "
            << monitor::status_name(rep.periodic_log.status) << " with "
            << rep.periodic_observations() << "; ratio "
            << rep.observation_ratio() << "\n";
  return 0;
}

int cmd_simulate(const std::string &scenario_path, const std::string &trace_path,
                 const std::string &out_path, const std::string &obstacle_name) {
  const LoadedScenario ls = load(scenario_path);
  stl::Trace trace;
  if (!trace_path.empty()) {
    trace = harness::read_trace_csv(trace_path);
  } else if (ls.scenario.affine && !ls.scenario.inputs.empty()) {
    trace = harness::simulate_plant(*ls.scenario.affine, ls.scenario.initial,
                                    ls.scenario.inputs);
  } else {
    throw Error("no trace: pass --trace or give the scenario a control sequence");
  }
  if (ls.scenario.affine)
    return simulate_with(backend::ContinuousBackend{*ls.scenario.affine}, ls, trace, out_path,
                         obstacle_name);
  return simulate_with(backend::GridBackend{&*ls.scenario.grid}, ls, trace, out_path,
                       obstacle_name);
}

geom::Vec parse_observation_line(const std::string &line, int t, int dim) {
  std::istringstream in(line);
  int rt = 0;
  if (!(in >> rt)) throw Error("malformed observation line: '" + line + "'");
  if (rt != t)
    throw Error("observation for instant " + std::to_string(rt) + " does not answer REQ " +
                std::to_string(t));
  geom::Vec x(static_cast<std::size_t>(dim), 0.0);
  for (int i = 0; i < dim; ++i)
    if (!(in >> x[static_cast<std::size_t>(i)]))
      throw Error("observation line carries fewer than " + std::to_string(dim) +
                  " coordinates");
  double extra = 0.0;
  if (in >> extra) throw Error("observation line carries too many coordinates");
  return x;
}

template <class B>
int monitor_with(const B &bk, const LoadedScenario &ls, const std::string &table_path) {
  std::optional<feasible::FeasibleTable<B>> tab;
  if (!table_path.empty()) {
    tab = harness::table_from_json_text(harness::slurp_file(table_path), bk, ls.spec);
    if (!tab)
      std::cerr << "table file does not match this scenario's formula; recomputing\n";
  }
  if (!tab) tab = build_table(bk, ls);

  monitor::MonitorConfig<B> cfg;
  cfg.backend = &bk;
  cfg.table = &*tab;
  cfg.t_max = ls.scenario.t_max;

  const int dim = ls.scenario.state_dim();
  monitor::Plant plant = [dim](int t) -> std::optional<geom::Vec> {
    std::cout << "REQ " << t << "\n" << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) return std::nullopt;
    return parse_observation_line(line, t, dim);
  };

  std::size_t announced = 0;
  auto on_observe = [&announced](int, const monitor::Belief<B> &,
                                 const monitor::TriggerDecision *d) {
    if (!d) return;  // final records are announced after the loop, verdict included
    std::cout << "DEC 0 TAU " << d->tau << "\n" << std::flush;
    ++announced;
  };

  monitor::MonitorLog log;
  try {
    log = monitor::run_self_triggered<B>(cfg, plant, on_observe);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cout << "STATUS fault\n" << std::flush;
    return kExitFault;
  }
  for (std::size_t i = announced; i < log.records.size(); ++i) {
    const auto &rec = log.records[i];
    std::cout << "DEC " << rec.decision << " TAU " << rec.tau << "\n" << std::flush;
  }
  std::cout << "STATUS " << monitor::status_name(log.status);
  if (log.alarm_instant >= 0) std::cout << " t=" << log.alarm_instant;
  if (log.fault_instant >= 0) std::cout << " t=" << log.fault_instant;
  std::cout << "\n" << std::flush;
  return status_exit_code(log.status);
}

int cmd_monitor(const std::string &scenario_path, const std::string &table_path) {
  const LoadedScenario ls = load(scenario_path);
  if (ls.scenario.affine)
    return monitor_with(backend::ContinuousBackend{*ls.scenario.affine}, ls, table_path);
  return monitor_with(backend::GridBackend{&*ls.scenario.grid}, ls, table_path);
}

// --seeds accepts a single value, an inclusive a..b range, or a comma list.
std::vector<std::uint64_t> parse_seeds(const std::string &text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string &piece : [&] {
         std::vector<std::string> out;
         std::string cur;
         for (char ch : text) {
           if (ch == ',') {
             out.push_back(cur);
             cur.clear();
           } else {
             cur += ch;
           }
         }
         out.push_back(cur);
         return out;
       }()) {
    const std::size_t dots = piece.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(std::stoull(piece));
      continue;
    }
    const std::uint64_t lo = std::stoull(piece.substr(0, dots));
    const std::uint64_t hi = std::stoull(piece.substr(dots + 2));
    if (hi < lo) throw Error("empty seed range '" + piece + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw Error("no seeds given");
  return seeds;
}

int cmd_oracle(const std::string &which, const std::string &seeds_text,
               const std::string &out_path) {
  nlohmann::ordered_json report;
  report["check"] = which;
  auto rows = nlohmann::ordered_json::array();
  bool all_pass = true;
  for (std::uint64_t seed : parse_seeds(seeds_text)) {
    oracle::CheckResult r;
    if (which == "check-feasible") r = oracle::check_feasible_tables(seed);
    else if (which == "check-theorem1") r = oracle::check_monitor_verdicts(seed);
    else r = oracle::check_belief_consistency(seed);
    all_pass = all_pass && r.pass;
    rows.push_back({{"seed", r.seed},
                    {"pass", r.pass},
                    {"compared", r.compared},
                    {"detail", r.detail}});
  }
  report["seeds"] = std::move(rows);
  report["all_pass"] = all_pass;
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) std::cout << text;
  else harness::spit_file(out_path, text);
  return all_pass ? 0 : 1;
}

int cmd_plot_data(const std::string &report_path, const std::string &out_dir) {
  harness::write_plot_csvs(harness::report_from_json_text(harness::slurp_file(report_path)),
                           out_dir);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"self-triggered online monitoring of affine systems against task formulas"};
  app.require_subcommand(1);

  std::string scenario_path, trace_path, table_path, report_path, out_path, obstacle_name,
      seeds_text = "0..9";

  CLI::App *pre = app.add_subcommand("precompute", "build and store the feasible-set table");
  pre->add_option("--scenario", scenario_path, "scenario file")->required();
  pre->add_option("--out", out_path, "table file to write")->required();

  CLI::App *sim = app.add_subcommand(
      "simulate", "run the self-triggered and periodic monitors over a recorded trace");
  sim->add_option("--scenario", scenario_path, "scenario file")->required();
  sim->add_option("--trace", trace_path,
                  "trace file; defaults to replaying the scenario's control sequence");
  sim->add_option("--out", out_path, "report file to write")->required();
  sim->add_option("--obstacle", obstacle_name,
                  "region name for forced-observation flags (default: Debris when present)");

  CLI::App *mon = app.add_subcommand(
      "monitor", "monitor a live plant over stdin/stdout (REQ t / t x1 .. xn / DEC d TAU k)");
  mon->add_option("--scenario", scenario_path, "scenario file")->required();
  mon->add_option("--table", table_path, "precomputed table file (recomputed when stale)");

  CLI::App *orc = app.add_subcommand("oracle", "cross-validate against brute-force oracles");
  orc->require_subcommand(1);
  std::vector<CLI::App *> checks = {
      orc->add_subcommand("check-feasible", "feasible-set table versus path enumeration"),
      orc->add_subcommand("check-theorem1", "monitor verdicts versus exhaustive prefixes"),
      orc->add_subcommand("check-prop1", "refined beliefs versus consistent explanations"),
  };
  for (CLI::App *c : checks) {
    c->add_option("--seeds", seeds_text, "seed, a..b range, or comma list (default 0..9)");
    c->add_option("--out", out_path, "write the JSON report here instead of stdout");
  }

  CLI::App *plot = app.add_subcommand("plot-data", "expand a report into plot-ready CSV files");
  plot->add_option("--report", report_path, "report file")->required();
  plot->add_option("--out", out_path, "directory for the CSV files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (pre->parsed()) return cmd_precompute(scenario_path, out_path);
    if (sim->parsed()) return cmd_simulate(scenario_path, trace_path, out_path, obstacle_name);
    if (mon->parsed()) return cmd_monitor(scenario_path, table_path);
    if (orc->parsed()) {
      for (CLI::App *c : checks)
        if (c->parsed()) return cmd_oracle(c->get_name(), seeds_text, out_path);
    }
    if (plot->parsed()) return cmd_plot_data(report_path, out_path);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
