#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "stmon/backend/grid.hpp"
#include "stmon/monitor/monitor.hpp"
#include "stmon/stl/semantics.hpp"

namespace stmon::oracle {

// Caps for the random instance generator; the defaults are the calibrated test
// sizes. The path budget bounds exhaustive enumeration per query (3^12).
struct InstanceParams {
  int max_cells = 64;
  int max_branching = 3;
  int max_subs = 3;
  int max_horizon = 12;
  int max_silence = 4;
  long long path_budget = 531441;
};

struct Instance {
  backend::GridSystem grid;
  stl::StlSpec spec;
  int t_max = 1;
};

// Reproducible random instance: 1-D embedded grid with representative points at
// integer coordinates, cell-aligned half-integer box regions, at least one until
// and one invariant when the spec has two or more conjuncts.
Instance random_instance(std::uint64_t seed, const InstanceParams &params = {});

// Number of transition paths spanning [t, horizon] from each cell, saturating
// at budget+1. counts[t][c] is the figure for cell c at instant t.
std::vector<std::vector<long long>> path_counts(const backend::GridSystem &g, int horizon,
                                                long long budget);

// All transition paths over instants [t0, t1] from `from`, in lexicographic
// successor order, at most `max_count` of them (0 = no cap, subject to budget).
std::vector<std::vector<int>> enumerate_paths(const backend::GridSystem &g, int from, int t0,
                                              int t1, std::size_t max_count);

stl::Trace trace_of_path(const backend::GridSystem &g, const std::vector<int> &path, int start);

// Cells from which some continuation over [t, horizon] satisfies what the spec
// still demands given pending set I, by brute-force path enumeration. ∅ when I
// holds an expired index.
backend::CellSet oracle_feasible(const stl::StlSpec &spec, const backend::GridSystem &g, int t,
                                 stl::IndexSet I, long long path_budget = 531441);

// Whether some continuation of the prefix (complete trace from instant 0)
// satisfies the spec; false means the prefix is violated.
bool oracle_prefix_feasible(const stl::StlSpec &spec, const backend::GridSystem &g,
                            const stl::Trace &prefix, long long path_budget = 531441);

// The set of (final cell, pending index set) explanations of an observation
// history: enumerate every path spanning the history, keep those matching the
// observed states at the observation instants, read the pending set off each
// survivor. Sorted and deduplicated.
std::vector<std::pair<int, stl::IndexSet>> oracle_consistent_beliefs(
    const stl::StlSpec &spec, const backend::GridSystem &g, const monitor::ObservationHistory &h,
    long long path_budget = 531441);

// Memoized oracle_feasible lookups for the trigger oracle.
class OracleFeasibleCache {
 public:
  OracleFeasibleCache(const stl::StlSpec &spec, const backend::GridSystem &g, long long budget)
      : spec_(spec), g_(g), budget_(budget) {}
  const backend::CellSet &get(int t, stl::IndexSet I);

 private:
  const stl::StlSpec &spec_;
  const backend::GridSystem &g_;
  long long budget_;
  std::map<std::pair<int, std::uint32_t>, backend::CellSet> cache_;
};

struct OracleTrigger {
  int tau = 1;
  bool determined_set_empty = false;  // the fallback value 1 was used
};

// Exhaustive trigger-interval evaluation on explicit augmented-state sets: step
// the belief pairs through the transition relation, stop at the first unsafe
// instant, return the largest determined instant reached (fallback 1 if none).
OracleTrigger oracle_trigger_time(const stl::StlSpec &spec, const backend::GridSystem &g,
                                  OracleFeasibleCache &feasible,
                                  std::vector<std::pair<int, stl::IndexSet>> pairs, int t,
                                  int t_max);

// Instance probes used for generator calibration and test-trace selection.
bool has_satisfying_path(const stl::StlSpec &spec, const backend::GridSystem &g,
                         long long path_budget = 531441);
bool has_failing_path(const stl::StlSpec &spec, const backend::GridSystem &g,
                      long long path_budget = 531441);

}  // namespace stmon::oracle
