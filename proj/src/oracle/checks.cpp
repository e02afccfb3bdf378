#include "stmon/oracle/checks.hpp"

#include <algorithm>

#include "stmon/feasible/table.hpp"

namespace stmon::oracle {

namespace {

using backend::CellSet;
using backend::GridBackend;

std::string pair_name(int t, stl::IndexSet I) {
  return "t=" + std::to_string(t) + " I=" + I.str();
}

// The monitor works on region-typed sets; the oracle speaks (cell, pending
// set). Exploding a refined or predicted belief bridges the two.
std::vector<std::pair<int, stl::IndexSet>> explode(const monitor::Belief<GridBackend> &b) {
  std::vector<std::pair<int, stl::IndexSet>> out;
  for (const auto &[set, I] : b.pairs)
    for (int c : set.cells) out.emplace_back(c, I);
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return a.first != b.first ? a.first < b.first : a.second < b.second;
  });
  return out;
}

struct InstanceRun {
  Instance inst;
  GridBackend bk;
  feasible::FeasibleTable<GridBackend> tab;
  monitor::MonitorConfig<GridBackend> cfg;

  explicit InstanceRun(std::uint64_t seed, const InstanceParams &params)
      : inst(random_instance(seed, params)), bk{&inst.grid} {
    tab = feasible::compute_feasible_table(bk, inst.spec);
    cfg.backend = &bk;
    cfg.table = &tab;
    cfg.t_max = inst.t_max;
  }
};

}  // namespace

CheckResult check_feasible_tables(std::uint64_t seed, const InstanceParams &params) {
  CheckResult r;
  r.seed = seed;
  Instance inst = random_instance(seed, params);
  GridBackend bk{&inst.grid};
  const auto tab = feasible::compute_feasible_table(bk, inst.spec);
  const auto reach = feasible::reachable_index_sets_by_layer(bk, inst.spec);
  for (int t = 0; t <= inst.spec.horizon; ++t) {
    for (stl::IndexSet I : reach[static_cast<std::size_t>(t)]) {
      const CellSet want = oracle_feasible(inst.spec, inst.grid, t, I, params.path_budget);
      ++r.compared;
      if (!(tab.at(t, I) == want)) {
        r.pass = false;
        r.detail = "feasible sets differ at " + pair_name(t, I);
        return r;
      }
    }
  }
  return r;
}

CheckResult check_monitor_verdicts(std::uint64_t seed, std::size_t max_traces,
                                   const InstanceParams &params) {
  CheckResult r;
  r.seed = seed;
  InstanceRun run(seed, params);
  OracleFeasibleCache cache(run.inst.spec, run.inst.grid, params.path_budget);
  const auto paths = enumerate_paths(run.inst.grid, run.inst.grid.initial, 0,
                                     run.inst.spec.horizon, max_traces);
  for (const auto &path : paths) {
    const stl::Trace tr = trace_of_path(run.inst.grid, path, 0);
    const auto seq = stl::induced_sequence_semantic(run.inst.spec, tr);
    const monitor::MonitorLog log =
        monitor::run_self_triggered<GridBackend>(run.cfg, monitor::trace_plant(tr));
    if (log.status == monitor::MonitorStatus::Fault ||
        log.status == monitor::MonitorStatus::Exhausted) {
      r.pass = false;
      r.detail = "monitor failed to finish a complete in-model trace";
      return r;
    }
    for (const auto &rec : log.records) {
      // Exhaustive feasibility of the full prefix up to this instant: the
      // observed state must admit a continuation under the pending set the
      // whole prefix induces.
      const bool feasible =
          cache.get(rec.t, seq[static_cast<std::size_t>(rec.t)]).contains(path[static_cast<std::size_t>(rec.t)]);
      ++r.compared;
      if ((rec.decision == 1) != !feasible) {
        r.pass = false;
        r.detail = "verdict mismatch at t=" + std::to_string(rec.t) +
                   (feasible ? " (false alarm)" : " (missed violation)");
        return r;
      }
    }
  }
  return r;
}

CheckResult check_belief_consistency(std::uint64_t seed, std::size_t max_traces,
                                     const InstanceParams &params) {
  CheckResult r;
  r.seed = seed;
  InstanceRun run(seed, params);
  const auto paths = enumerate_paths(run.inst.grid, run.inst.grid.initial, 0,
                                     run.inst.spec.horizon, max_traces);
  for (const auto &path : paths) {
    const stl::Trace tr = trace_of_path(run.inst.grid, path, 0);
    monitor::ObservationHistory hist;
    int prev_t = 0;
    bool mismatch = false;
    auto on_observe = [&](int t, const monitor::Belief<GridBackend> &refined,
                          const monitor::TriggerDecision *) {
      if (mismatch) return;
      if (!hist.states.empty()) hist.taus.push_back(t - prev_t);
      hist.states.push_back(tr.at(t));
      prev_t = t;
      const auto want = oracle_consistent_beliefs(run.inst.spec, run.inst.grid, hist,
                                                  params.path_budget);
      ++r.compared;
      if (explode(refined) != want) {
        mismatch = true;
        r.pass = false;
        r.detail = "belief mismatch at t=" + std::to_string(t);
      }
    };
    (void)monitor::run_self_triggered<GridBackend>(run.cfg, monitor::trace_plant(tr),
                                                   on_observe);
    if (mismatch) return r;
  }
  return r;
}

TriggerCheckResult check_trigger_choices(std::uint64_t seed, std::size_t max_traces,
                                         const InstanceParams &params) {
  TriggerCheckResult out;
  out.result.seed = seed;
  InstanceRun run(seed, params);
  OracleFeasibleCache cache(run.inst.spec, run.inst.grid, params.path_budget);
  const auto paths = enumerate_paths(run.inst.grid, run.inst.grid.initial, 0,
                                     run.inst.spec.horizon, max_traces);
  for (const auto &path : paths) {
    const stl::Trace tr = trace_of_path(run.inst.grid, path, 0);
    bool mismatch = false;
    auto on_observe = [&](int t, const monitor::Belief<GridBackend> &refined,
                          const monitor::TriggerDecision *d) {
      if (mismatch || !d) return;
      const OracleTrigger want = oracle_trigger_time(run.inst.spec, run.inst.grid, cache,
                                                     explode(refined), t, run.inst.t_max);
      ++out.result.compared;
      if (want.determined_set_empty) ++out.fallback_rounds;
      if (d->tau != want.tau || d->fallback_used != want.determined_set_empty) {
        mismatch = true;
        out.result.pass = false;
        out.result.detail = "trigger mismatch at t=" + std::to_string(t) + ": chose " +
                            std::to_string(d->tau) + ", exhaustive value " +
                            std::to_string(want.tau);
      }
    };
    (void)monitor::run_self_triggered<GridBackend>(run.cfg, monitor::trace_plant(tr),
                                                   on_observe);
    if (mismatch) return out;
  }
  return out;
}

}  // namespace stmon::oracle
