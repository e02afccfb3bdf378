#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stmon/backend/continuous.hpp"
#include "stmon/backend/grid.hpp"
#include "stmon/feasible/table.hpp"
#include "stmon/harness/models.hpp"
#include "stmon/monitor/monitor.hpp"
#include "stmon/stl/semantics.hpp"

namespace stmon::harness {

// Decimal text form with round-trip precision (17 significant digits).
std::string format_double(double v);
double parse_double(const std::string &text);

// Trace files: header `t,x1,...,xn`, one row per instant, consecutive t.
void write_trace_csv(const std::string &path, const stl::Trace &tr);
stl::Trace read_trace_csv(const std::string &path);

// Region literals: {"dim":n,"parts":[{"A":[[...]],"b":[...]},...]} on output;
// the box shorthand {"box":[[lo,hi],...]} is accepted on input.
std::string region_to_json_text(const geom::Region &r);
geom::Region region_from_json_text(const std::string &text);

// A monitoring problem as a file: one system (affine dynamics or an explicit
// transition grid), named regions for the formula to reference, the formula
// itself, the silence bound and the plant behavior to replay.
struct Scenario {
  std::string name;
  std::optional<geom::AffineSystem> affine;
  std::optional<backend::GridSystem> grid;
  std::map<std::string, geom::Region> regions;
  std::string formula;
  int t_max = 1;
  geom::Vec initial;
  std::vector<geom::Vec> inputs;  // scripted controls; may be empty
  std::size_t part_budget = 256;

  int state_dim() const;
  stl::SymbolTable symbols() const;  // default bindings plus `regions`
  stl::StlSpec parse() const;
};

Scenario scenario_of_model(const Model &m, const geom::Vec &initial,
                           const std::vector<geom::Vec> &inputs);
std::string scenario_to_json_text(const Scenario &s);
Scenario scenario_from_json_text(const std::string &text);
Scenario load_scenario(const std::string &path);
void save_scenario(const std::string &path, const Scenario &s);

// Feasible-set tables as files, keyed by the spec digest so a stale artifact
// is detected instead of silently reused.
std::string table_to_json_text(const feasible::FeasibleTable<backend::ContinuousBackend> &tab);
std::string table_to_json_text(const feasible::FeasibleTable<backend::GridBackend> &tab);
// Parses and checks the digest; nullopt when the file belongs to another spec.
std::optional<feasible::FeasibleTable<backend::ContinuousBackend>> table_from_json_text(
    const std::string &text, const backend::ContinuousBackend &bk, const stl::StlSpec &spec);
std::optional<feasible::FeasibleTable<backend::GridBackend>> table_from_json_text(
    const std::string &text, const backend::GridBackend &bk, const stl::StlSpec &spec);

std::string slurp_file(const std::string &path);
void spit_file(const std::string &path, const std::string &content);

// Everything a monitoring run produces, in plot-friendly form.
struct RunReport {
  std::string scenario;
  int horizon = 0;
  int t_max = 1;
  stl::Trace trace;
  monitor::MonitorLog self_log;
  monitor::MonitorLog periodic_log;

  // Bounding box of each belief explanation at each observation.
  struct BeliefBox {
    int t = 0;
    std::string pending;
    std::vector<std::pair<double, double>> box;
  };
  std::vector<BeliefBox> belief_boxes;

  // Per-observation flag: the prediction the trigger scan stopped on meets the
  // named obstacle region, so the early observation was forced by it.
  struct ObstacleFlag {
    int t = 0;
    bool overlap = false;
    bool forced = false;
  };
  std::string obstacle_name;  // empty when the scenario has no such region
  std::vector<ObstacleFlag> obstacle_flags;

  // Bounding box and size of the feasible set along the full pending chain.
  struct FeasibleBox {
    int t = 0;
    std::string pending;
    std::size_t parts = 0;
    std::vector<std::pair<double, double>> box;
  };
  std::vector<FeasibleBox> feasible_boxes;

  struct TableStats {
    std::size_t entries = 0;
    std::size_t max_parts = 0;
    long long build_ms = 0;
  } table;

  std::size_t self_observations() const { return self_log.records.size(); }
  std::size_t periodic_observations() const { return periodic_log.records.size(); }
  double observation_ratio() const {
    return periodic_log.records.empty()
               ? 0.0
               : static_cast<double>(self_log.records.size()) /
                     static_cast<double>(periodic_log.records.size());
  }
};

std::string report_to_json_text(const RunReport &r);
RunReport report_from_json_text(const std::string &text);

// report.json next to plot-ready CSV series (trajectory with trigger markers,
// belief boxes, feasible-set boxes, obstacle flags).
void export_report(const RunReport &r, const std::string &json_path);
void write_plot_csvs(const RunReport &r, const std::string &dir);

namespace detail {

inline std::size_t set_parts(const geom::Region &s) { return s.parts.size(); }
inline std::size_t set_parts(const backend::CellSet &s) { return s.cells.size(); }

inline std::vector<std::pair<double, double>> set_bounding_box(const backend::ContinuousBackend &,
                                                               const geom::Region &s) {
  return geom::region_bounding_box(s);
}

inline std::vector<std::pair<double, double>> set_bounding_box(const backend::GridBackend &bk,
                                                               const backend::CellSet &s) {
  std::vector<std::pair<double, double>> box;
  for (int c : s.cells) {
    const geom::Vec &p = bk.g->rep(c);
    if (box.empty())
      for (double v : p) box.emplace_back(v, v);
    else
      for (std::size_t i = 0; i < p.size(); ++i) {
        box[i].first = std::min(box[i].first, p[i]);
        box[i].second = std::max(box[i].second, p[i]);
      }
  }
  return box;
}

}  // namespace detail

// Runs both monitors over a trace and assembles the report. `obstacle` names a
// region in `regions`; when present, every trigger decision that stopped on an
// unsafe prediction is checked for overlap between that prediction and the
// obstacle.
template <class B>
RunReport run_report(const B &bk, const stl::StlSpec &spec, const std::string &scenario_name,
                     int t_max, const stl::Trace &trace,
                     const feasible::FeasibleTable<B> &tab,
                     const geom::Region *obstacle = nullptr,
                     const std::string &obstacle_name = {},
                     std::size_t belief_budget = 0) {
  RunReport rep;
  rep.scenario = scenario_name;
  rep.horizon = tab.horizon;
  rep.t_max = t_max;
  rep.trace = trace;
  rep.obstacle_name = obstacle ? obstacle_name : std::string();

  monitor::MonitorConfig<B> cfg;
  cfg.backend = &bk;
  cfg.table = &tab;
  cfg.t_max = t_max;
  cfg.belief_budget = belief_budget;

  std::optional<typename B::Set> obstacle_set;
  if (obstacle) obstacle_set = bk.from_region(*obstacle);

  auto on_observe = [&](int t, const monitor::Belief<B> &refined,
                        const monitor::TriggerDecision *d) {
    for (const auto &[set, I] : refined.pairs)
      rep.belief_boxes.push_back({t, I.str(), detail::set_bounding_box(bk, set)});
    if (!obstacle_set || !d) return;
    RunReport::ObstacleFlag flag;
    flag.t = t;
    flag.forced = d->stopped_unsafe;
    if (d->stopped_unsafe) {
      // Replay the scan up to the prediction it stopped on and test it
      // against the obstacle.
      monitor::Belief<B> pred = refined;
      for (int k = 1; k <= d->unsafe_step; ++k)
        pred = monitor::belief_predict_one(bk, spec, pred, t + k - 1, belief_budget);
      for (const auto &[set, I] : pred.pairs)
        if (!bk.is_empty(bk.intersect(set, *obstacle_set))) {
          flag.overlap = true;
          break;
        }
    }
    rep.obstacle_flags.push_back(flag);
  };

  rep.self_log = monitor::run_self_triggered<B>(cfg, monitor::trace_plant(trace), on_observe);
  rep.periodic_log = monitor::run_periodic<B>(cfg, monitor::trace_plant(trace));

  // Feasible boxes along the exact pending chain of the trace.
  stl::IndexSet I = stl::IndexSet::all(spec.count());
  for (int t = 0; t <= tab.horizon && t - trace.start < static_cast<int>(trace.states.size());
       ++t) {
    if (tab.has(t, I)) {
      const auto &set = tab.at(t, I);
      RunReport::FeasibleBox fb;
      fb.t = t;
      fb.pending = I.str();
      fb.parts = detail::set_parts(set);
      fb.box = detail::set_bounding_box(bk, set);
      rep.feasible_boxes.push_back(std::move(fb));
    }
    if (t < static_cast<int>(trace.states.size()))
      I = stl::update_index_set(spec, I, t, trace.at(t));
  }

  rep.table.entries = 0;
  rep.table.max_parts = 0;
  for (const auto &layer : tab.layers) {
    rep.table.entries += layer.size();
    for (const auto &[_, set] : layer)
      rep.table.max_parts = std::max(rep.table.max_parts, detail::set_parts(set));
  }
  return rep;
}

}  // namespace stmon::harness
