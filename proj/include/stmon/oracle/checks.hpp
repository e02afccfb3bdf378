#pragma once

#include <cstdint>
#include <string>

#include "stmon/oracle/oracle.hpp"

namespace stmon::oracle {

// Outcome of one seeded cross-validation run. `detail` pinpoints the first
// disagreement; empty on a pass.
struct CheckResult {
  std::uint64_t seed = 0;
  bool pass = true;
  std::string detail;
  int compared = 0;  // how many individual comparisons the run made
};

// Aggregates a trigger-choice run, since the fallback rounds are reported
// separately from the exact matches.
struct TriggerCheckResult {
  CheckResult result;
  int fallback_rounds = 0;
};

// Feasible-set cross-validation: the backward-recursion table must equal the
// path-enumeration value on every reachable (instant, pending set) pair.
CheckResult check_feasible_tables(std::uint64_t seed, const InstanceParams &params = {});

// Verdict cross-validation: over every enumerable trace of the instance, at
// every instant the self-triggered monitor chose to observe, its alarm
// decision must equal the exhaustive feasibility of the full prefix so far.
CheckResult check_monitor_verdicts(std::uint64_t seed, std::size_t max_traces = 60,
                                   const InstanceParams &params = {});

// Belief cross-validation: after every observation, the refined belief must
// list exactly the (cell, pending set) explanations consistent with the
// observation history.
CheckResult check_belief_consistency(std::uint64_t seed, std::size_t max_traces = 30,
                                     const InstanceParams &params = {});

// Trigger cross-validation: every chosen silence must equal the exhaustive
// trigger-rule value, with fallback rounds tallied on the side.
TriggerCheckResult check_trigger_choices(std::uint64_t seed, std::size_t max_traces = 30,
                                         const InstanceParams &params = {});

}  // namespace stmon::oracle
