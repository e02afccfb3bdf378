#pragma once

#include <vector>

#include "stmon/stl/ast.hpp"

namespace stmon::stl {

// Closed-membership satisfaction of the whole conjunction over a trace that
// must cover every conjunct's window. A globally conjunct needs x_t in h1 on
// all of [a,b]; a modified until needs a witness t' in [a,b] with x_t' in h1
// and h2 while x stays in h1 on all of [a,t'].
bool evaluate_trace(const StlSpec &spec, const Trace &trace);

// One monitoring step on the pending-index set: among indices of I active at t,
// an until is discharged exactly when x lies in h1 and h2, and a globally drops
// out exactly when its window closes (t == b). Inactive members are kept as-is.
IndexSet update_index_set(const StlSpec &spec, IndexSet I, int t, const geom::Vec &x);

// One block of the state-space partition induced by the update at instant t:
// all states in `cell` map the pending set I to the same successor set `next`.
struct OutcomeCell {
  geom::Region cell;
  IndexSet next;
};

// Partitions `domain` by which active untils of I a state discharges at t; each
// block pairs the region with update_index_set's result there. Complement blocks
// use closed set differences, matching the closed membership convention. Blocks
// are emitted in a deterministic order and empty ones are dropped.
std::vector<OutcomeCell> update_outcome_cells(const StlSpec &spec, IndexSet I, int t,
                                              const geom::Region &domain);

// The conjunction still owed at instant t by a run whose pending set is I:
// active members restart their window at t, and every conjunct that has not yet
// opened is included unchanged. Throws if I holds an index whose window already
// closed (such a run can no longer satisfy the spec). May have zero conjuncts.
StlSpec remaining_formula(const StlSpec &spec, IndexSet I, int t);

// Pending-index sequence read directly off the trace: element k is computed
// from the prefix x_0..x_{k-1} alone. An until is absent from element k iff some
// t' in [a, min(k-1, b)] hit h1 and h2; a globally is absent iff k > b. The
// trace must start at 0; the result has states.size() + 1 elements.
std::vector<IndexSet> induced_sequence_semantic(const StlSpec &spec, const Trace &trace);

// The same sequence built by folding update_index_set over the trace from the
// full index set. Agreement with the direct form is a correctness invariant.
std::vector<IndexSet> induced_sequence_update(const StlSpec &spec, const Trace &trace);

}  // namespace stmon::stl
