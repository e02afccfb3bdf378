#include "doctest.h"

#include <algorithm>

#include "stmon/backend/continuous.hpp"
#include "stmon/backend/grid.hpp"
#include "stmon/harness/models.hpp"
#include "stmon/monitor/monitor.hpp"
#include "stmon/oracle/oracle.hpp"

using namespace stmon;

namespace {

backend::GridSystem line_grid() {
  backend::GridSystem g;
  g.cells = {{0.0}, {1.0}, {2.0}, {3.0}};
  g.succ = {{0, 1}, {1, 2}, {2, 3}, {3}};
  g.initial = 0;
  g.domain = geom::Region::box({{-0.5, 3.5}});
  return g;
}

stl::IndexSet only(std::initializer_list<int> xs) {
  stl::IndexSet s;
  for (int x : xs) s.insert(x);
  return s;
}

}  // namespace

TEST_CASE("belief prediction on the line grid, derived by hand") {
  backend::GridSystem g = line_grid();
  backend::GridBackend bk{&g};
  stl::StlSpec spec = stl::parse_spec("F[0,2] x in [1.5,3.5]", 1);
  auto tab = feasible::compute_feasible_table(bk, spec);

  // Starting on cell 1, still outside the target: one blind step can reach
  // cells 1 and 2, both still pending.
  auto b0 = monitor::belief_initial(bk, spec, g.rep(1));
  auto b1 = monitor::belief_predict_one(bk, spec, b0, 0);
  REQUIRE(b1.size() == 1);
  CHECK(b1.pairs[0].first == backend::CellSet{{1, 2}});
  CHECK(b1.pairs[0].second == only({1}));
  CHECK(monitor::belief_is_safe(bk, tab, b1, 1));
  CHECK(monitor::belief_is_determined(bk, spec, b1, 1));

  // A second blind step splits the explanations: runs through cell 2 have
  // discharged, runs still on cell 1 have not, and the latter sit outside
  // their feasible set.
  auto b2 = monitor::belief_predict_one(bk, spec, b1, 1);
  REQUIRE(b2.size() == 2);
  CHECK(b2.pairs[0].first == backend::CellSet{{2, 3}});
  CHECK(b2.pairs[0].second == stl::IndexSet{});
  CHECK(b2.pairs[1].first == backend::CellSet{{1, 2}});
  CHECK(b2.pairs[1].second == only({1}));
  CHECK_FALSE(monitor::belief_is_safe(bk, tab, b2, 2));

  // Refining on cell 2 keeps both explanations alive (the pending one is the
  // one that just arrived from cell 1), so the belief is undetermined there.
  auto r = monitor::belief_refine(bk, b2, g.rep(2));
  REQUIRE(r.size() == 2);
  CHECK(monitor::belief_is_determined(bk, spec, r, 2));

  monitor::MonitorConfig<backend::GridBackend> cfg;
  cfg.backend = &bk;
  cfg.table = &tab;
  cfg.t_max = 1;
  // t_max within [1, horizon) holds here; the trigger from cell 1 at instant 0
  // accepts the single safe determined step.
  auto d = monitor::trigger_time(cfg, b0, 0);
  CHECK(d.tau == 1);
  CHECK_FALSE(d.fallback_used);
}

TEST_CASE("a task with nothing left to decide always sleeps the full bound") {
  backend::GridSystem g = line_grid();
  backend::GridBackend bk{&g};
  stl::StlSpec spec = stl::parse_spec("G[0,8] TRUE", 1);
  auto tab = feasible::compute_feasible_table(bk, spec);

  monitor::MonitorConfig<backend::GridBackend> cfg;
  cfg.backend = &bk;
  cfg.table = &tab;
  cfg.t_max = 3;

  stl::Trace tr;
  tr.start = 0;
  for (int c : {0, 1, 2, 3, 3, 3, 3, 3, 3}) tr.states.push_back(g.rep(c));
  auto log = monitor::run_self_triggered(cfg, monitor::trace_plant(tr));
  CHECK(log.status == monitor::MonitorStatus::Completed);
  std::vector<int> instants = monitor::history_of(log).instants();
  CHECK(instants == std::vector<int>{0, 3, 6, 8});

  auto periodic = monitor::run_periodic(cfg, monitor::trace_plant(tr));
  CHECK(periodic.status == monitor::MonitorStatus::Completed);
  CHECK(periodic.observations() == 9);
}

TEST_CASE("altitude model runs") {
  harness::Model m = harness::build_drone_model();
  backend::ContinuousBackend bk{m.sys};
  auto tab = feasible::compute_feasible_table(bk, m.spec);

  monitor::MonitorConfig<backend::ContinuousBackend> cfg;
  cfg.backend = &bk;
  cfg.table = &tab;
  cfg.t_max = m.t_max;

  stl::Trace ref = harness::simulate_plant(m.sys, harness::drone_initial_state(),
                                           harness::drone_reference_inputs());
  stl::Trace hover = harness::simulate_plant(m.sys, harness::drone_initial_state(),
                                             harness::drone_hover_inputs());

  SUBCASE("the satisfying run completes with few observations") {
    auto log = monitor::run_self_triggered(cfg, monitor::trace_plant(ref));
    CHECK(log.status == monitor::MonitorStatus::Completed);
    CHECK(log.observations() < 51);
    // Every observed state is explained by the refined belief, which run
    // bookkeeping guarantees; spot-check the observation instants instead.
    std::vector<int> instants = monitor::history_of(log).instants();
    CHECK(instants.front() == 0);
    CHECK(instants.back() == 50);
    CHECK(std::is_sorted(instants.begin(), instants.end()));

    auto periodic = monitor::run_periodic(cfg, monitor::trace_plant(ref));
    CHECK(periodic.status == monitor::MonitorStatus::Completed);
    CHECK(log.observations() < periodic.observations());
  }

  SUBCASE("holding the pad raises the alarm exactly when recovery is lost") {
    auto periodic = monitor::run_periodic(cfg, monitor::trace_plant(hover));
    CHECK(periodic.status == monitor::MonitorStatus::ViolatedAlarm);
    CHECK(periodic.alarm_instant == 14);
    CHECK(periodic.observations() == 15);

    auto log = monitor::run_self_triggered(cfg, monitor::trace_plant(hover));
    CHECK(log.status == monitor::MonitorStatus::ViolatedAlarm);
    CHECK(log.alarm_instant >= 14);
    CHECK(log.observations() < periodic.observations());
    // The alarm instant must be a confirmed violation of the prefix seen.
    stl::Trace prefix;
    prefix.start = 0;
    prefix.states.assign(hover.states.begin(), hover.states.begin() + log.alarm_instant + 1);
    auto verdict = feasible::classify_prefix(bk, tab, prefix);
    CHECK(verdict.verdict == feasible::PrefixClass::Violated);
  }

  SUBCASE("an off-model observation is reported as a fault") {
    // Whatever the chosen silence, the second observation cannot be reached
    // from the pad that fast.
    monitor::Plant plant = [](int t) -> std::optional<geom::Vec> {
      if (t == 0) return geom::Vec{0.0, 0.0};
      return geom::Vec{90.0, -4.0};
    };
    auto log = monitor::run_self_triggered(cfg, plant);
    CHECK(log.status == monitor::MonitorStatus::Fault);
    CHECK(log.fault_instant >= 1);
  }

  SUBCASE("a short stream is reported as exhausted") {
    stl::Trace shortened = ref;
    shortened.states.resize(20);
    auto log = monitor::run_self_triggered(cfg, monitor::trace_plant(shortened));
    CHECK(log.status == monitor::MonitorStatus::Exhausted);
  }
}

TEST_CASE("grid trigger choices match the exhaustive rule") {
  for (std::uint64_t seed : {21ull, 22ull, 23ull}) {
    oracle::Instance inst = oracle::random_instance(seed);
    backend::GridBackend bk{&inst.grid};
    auto tab = feasible::compute_feasible_table(bk, inst.spec);
    oracle::OracleFeasibleCache cache(inst.spec, inst.grid, 531441);

    monitor::MonitorConfig<backend::GridBackend> cfg;
    cfg.backend = &bk;
    cfg.table = &tab;
    cfg.t_max = inst.t_max;

    auto paths = oracle::enumerate_paths(inst.grid, inst.grid.initial, 0, inst.spec.horizon, 40);
    for (const auto &path : paths) {
      stl::Trace tr = oracle::trace_of_path(inst.grid, path, 0);
      auto check = [&](int t, const monitor::Belief<backend::GridBackend> &b,
                       const monitor::TriggerDecision *d) {
        if (!d) return;
        std::vector<std::pair<int, stl::IndexSet>> pairs;
        for (const auto &[set, I] : b.pairs)
          for (int c : set.cells) pairs.emplace_back(c, I);
        auto want = oracle::oracle_trigger_time(inst.spec, inst.grid, cache, pairs, t, cfg.t_max);
        INFO("seed ", seed, " t ", t);
        CHECK(d->tau == want.tau);
        CHECK(d->fallback_used == want.determined_set_empty);
      };
      monitor::run_self_triggered<backend::GridBackend>(cfg, monitor::trace_plant(tr), check);
    }
  }
}
