#include "doctest.h"

#include "stmon/backend/continuous.hpp"
#include "stmon/backend/grid.hpp"
#include "stmon/feasible/table.hpp"
#include "stmon/harness/models.hpp"
#include "stmon/oracle/oracle.hpp"

using namespace stmon;

namespace {

// Four cells on a line, each stepping right or staying, the last absorbing.
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

stl::Trace rep_trace(const backend::GridSystem &g, const std::vector<int> &cells) {
  stl::Trace tr;
  tr.start = 0;
  for (int c : cells) tr.states.push_back(g.rep(c));
  return tr;
}

}  // namespace

TEST_CASE("line grid feasible sets, derived by hand") {
  backend::GridSystem g = line_grid();
  backend::GridBackend bk{&g};
  stl::StlSpec spec = stl::parse_spec("F[0,2] x in [1.5,3.5]", 1);

  auto tab = feasible::compute_feasible_table(bk, spec);
  CHECK(tab.horizon == 2);

  // Target cells are 2 and 3. Working backward: reach them now, or step toward
  // them in time.
  CHECK(tab.at(2, only({1})) == backend::CellSet{{2, 3}});
  CHECK(tab.at(1, only({1})) == backend::CellSet{{1, 2, 3}});
  CHECK(tab.at(0, only({1})) == backend::CellSet{{0, 1, 2, 3}});
  // Once discharged there is nothing left to satisfy.
  CHECK(tab.at(1, stl::IndexSet{}) == backend::CellSet{{0, 1, 2, 3}});
  CHECK(tab.at(2, stl::IndexSet{}) == backend::CellSet{{0, 1, 2, 3}});

  auto reach = feasible::reachable_index_sets_by_layer(bk, spec);
  CHECK(reach[0] == std::vector<stl::IndexSet>{only({1})});
  CHECK(reach[1] == std::vector<stl::IndexSet>{stl::IndexSet{}, only({1})});

  // Loitering on cell 0 can no longer reach the target once one step is gone.
  auto bad = feasible::classify_prefix(bk, tab, rep_trace(g, {0, 0, 0}));
  CHECK(bad.verdict == feasible::PrefixClass::Violated);
  CHECK(bad.first_violation == 1);

  auto good = feasible::classify_prefix(bk, tab, rep_trace(g, {0, 1, 2}));
  CHECK(good.verdict == feasible::PrefixClass::Feasible);
  CHECK(good.pending_end == stl::IndexSet{});
}

TEST_CASE("relaxed and literal recursion agree") {
  for (std::uint64_t seed : {0ull, 1ull, 2ull, 3ull, 4ull, 5ull, 6ull, 7ull}) {
    oracle::Instance inst = oracle::random_instance(seed);
    backend::GridBackend bk{&inst.grid};
    auto relaxed = feasible::compute_feasible_table(bk, inst.spec, feasible::PendingCellMode::Relaxed);
    auto literal = feasible::compute_feasible_table(bk, inst.spec, feasible::PendingCellMode::Literal);
    REQUIRE(relaxed.layers.size() == literal.layers.size());
    for (std::size_t t = 0; t < relaxed.layers.size(); ++t) {
      REQUIRE(relaxed.layers[t].size() == literal.layers[t].size());
      for (const auto &[I, set] : relaxed.layers[t]) {
        INFO("seed ", seed, " t ", t, " I ", I.str());
        CHECK(bk.set_equal(set, literal.at(static_cast<int>(t), I)));
      }
    }
  }
}

TEST_CASE("grid feasible sets match the path oracle") {
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    oracle::Instance inst = oracle::random_instance(seed);
    backend::GridBackend bk{&inst.grid};
    auto tab = feasible::compute_feasible_table(bk, inst.spec);
    for (int t = 0; t <= inst.spec.horizon; ++t)
      for (stl::IndexSet I : feasible::reachable_index_sets(bk, inst.spec, t)) {
        INFO("seed ", seed, " t ", t, " I ", I.str());
        CHECK(tab.at(t, I) == oracle::oracle_feasible(inst.spec, inst.grid, t, I));
      }
  }
}

TEST_CASE("altitude model feasible sets") {
  harness::Model m = harness::build_drone_model();
  backend::ContinuousBackend bk{m.sys};
  auto tab = feasible::compute_feasible_table(bk, m.spec);
  CHECK(tab.horizon == 50);

  // At the deadline only the final corridor-and-target overlap remains.
  geom::Region want = geom::Region::box({{55.0, 60.0}, {-5.0, 5.0}});
  CHECK(geom::region_equal(tab.at(50, only({3})), want));

  // One step out, climbing into the target is possible from 58 but hopeless
  // from 31 (the climb rate is bounded).
  CHECK(bk.contains_state(tab.at(49, only({3})), {58.0, 0.0}));
  CHECK_FALSE(bk.contains_state(tab.at(49, only({3})), {31.0, 0.0}));

  // The full pending set is the only explanation at launch, and the launch pad
  // is feasible there.
  auto reach = feasible::reachable_index_sets_by_layer(bk, m.spec);
  CHECK(reach[0] == std::vector<stl::IndexSet>{only({1, 2, 3})});
  CHECK(bk.contains_state(tab.at(0, only({1, 2, 3})), {0.0, 0.0}));

  // Past the early deadlines, any still-pending early obligation is hopeless.
  auto at21 = reach[21];
  for (stl::IndexSet I : {only({1, 3}), only({2, 3}), only({1, 2, 3})}) {
    CHECK(std::find(at21.begin(), at21.end(), I) != at21.end());
    CHECK(bk.is_empty(tab.at(21, I)));
  }
  CHECK(std::find(at21.begin(), at21.end(), only({3})) != at21.end());
  CHECK_FALSE(bk.is_empty(tab.at(21, only({3}))));

  // More pending obligations never enlarge a feasible set.
  for (int t : {5, 10, 15, 20}) {
    if (tab.has(t, only({1, 2, 3})) && tab.has(t, only({3})))
      CHECK(bk.is_subset(tab.at(t, only({1, 2, 3})), tab.at(t, only({3}))));
  }

  // The shipped behaviors: the reference run satisfies the task and stays
  // feasible; holding the pad becomes hopeless at step 14.
  stl::Trace ref = harness::simulate_plant(m.sys, harness::drone_initial_state(),
                                           harness::drone_reference_inputs());
  CHECK(stl::evaluate_trace(m.spec, ref));
  auto ok = feasible::classify_prefix(bk, tab, ref);
  CHECK(ok.verdict == feasible::PrefixClass::Feasible);

  stl::Trace hover = harness::simulate_plant(m.sys, harness::drone_initial_state(),
                                             harness::drone_hover_inputs());
  CHECK_FALSE(stl::evaluate_trace(m.spec, hover));
  auto bad = feasible::classify_prefix(bk, tab, hover);
  CHECK(bad.verdict == feasible::PrefixClass::Violated);
  CHECK(bad.first_violation == 14);

  // Literal mode computes the same sets on the continuous backend too.
  auto literal = feasible::compute_feasible_table(bk, m.spec, feasible::PendingCellMode::Literal);
  for (int t : {0, 14, 21, 40, 49, 50})
    for (stl::IndexSet I : feasible::reachable_index_sets(bk, m.spec, t)) {
      INFO("t ", t, " I ", I.str());
      CHECK(bk.set_equal(tab.at(t, I), literal.at(t, I)));
    }
}
