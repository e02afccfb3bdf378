#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "stmon/stl/parser.hpp"
#include "stmon/stl/semantics.hpp"

namespace stmon::feasible {

// How the backward recursion constrains a still-pending until at the current
// instant. Literal keeps the exact case split (hold set minus target set);
// Relaxed keeps only the hold set, which yields the same union because a state
// that also hits the target lands in a term with strictly fewer obligations and
// a feasible set at least as large. Relaxed avoids complement blow-up on unions.
enum class PendingCellMode { Relaxed, Literal };

// Layered map (instant, pending index set) -> feasible states. An entry exists
// for every pair reachable from the full index set at instant 0; pairs whose
// pending set holds an expired window map to the empty set.
template <class B>
struct FeasibleTable {
  stl::StlSpec spec;
  std::uint64_t spec_hash = 0;
  int horizon = 0;
  PendingCellMode mode = PendingCellMode::Relaxed;
  std::vector<std::map<stl::IndexSet, typename B::Set>> layers;

  bool has(int t, stl::IndexSet I) const {
    return t >= 0 && t <= horizon &&
           layers[static_cast<std::size_t>(t)].find(I) != layers[static_cast<std::size_t>(t)].end();
  }
  const typename B::Set &at(int t, stl::IndexSet I) const {
    if (t < 0 || t > horizon) throw Error("feasible-set lookup outside the horizon");
    const auto &layer = layers[static_cast<std::size_t>(t)];
    auto it = layer.find(I);
    if (it == layer.end())
      throw Error("no feasible-set entry for t=" + std::to_string(t) + " I=" + I.str());
    return it->second;
  }
};

// The state-space partition of one monitoring step, in backend sets. Blocks

// whose set representation is empty are dropped.
template <class B>
std::vector<std::pair<typename B::Set, stl::IndexSet>> backend_update_cells(
    const B &bk, const stl::StlSpec &spec, stl::IndexSet I, int t) {
  std::vector<std::pair<typename B::Set, stl::IndexSet>> out;
  for (stl::OutcomeCell &c : stl::update_outcome_cells(spec, I, t, bk.domain_region())) {
    typename B::Set s = bk.from_region(c.cell);
    if (!bk.is_empty(s)) out.emplace_back(std::move(s), c.next);
  }
  return out;
}

// Pending index sets the monitor can meet at each instant: forward closure of
// the update-outcome relation from the full set, empty blocks pruned.
template <class B>
std::vector<std::vector<stl::IndexSet>> reachable_index_sets_by_layer(const B &bk,
                                                                      const stl::StlSpec &spec) {
  const int T = spec.horizon;
  std::vector<std::set<stl::IndexSet>> reach(static_cast<std::size_t>(T) + 1);
  reach[0].insert(stl::IndexSet::all(spec.count()));
  for (int t = 0; t < T; ++t)
    for (stl::IndexSet I : reach[static_cast<std::size_t>(t)])
      for (auto &[cell, next] : backend_update_cells(bk, spec, I, t))
        reach[static_cast<std::size_t>(t) + 1].insert(next);
  std::vector<std::vector<stl::IndexSet>> out(reach.size());
  for (std::size_t t = 0; t < reach.size(); ++t)
    out[t].assign(reach[t].begin(), reach[t].end());
  return out;
}

template <class B>
std::vector<stl::IndexSet> reachable_index_sets(const B &bk, const stl::StlSpec &spec, int t) {
  if (t < 0 || t > spec.horizon) throw Error("instant outside the horizon");
  return reachable_index_sets_by_layer(bk, spec)[static_cast<std::size_t>(t)];
}

namespace detail {

// Constraint blocks of the backward recursion at instant t < T: one block per
// subset S of the active untils in I (S = the untils discharged right now),
// paired with the successor pending set. Unlike the update partition, pending
// untils contribute their hold set (or hold minus target in Literal mode), and
// blocks may overlap in Relaxed mode without affecting the union.
template <class B>
std::vector<std::pair<typename B::Set, stl::IndexSet>> recursion_cells(
    const B &bk, const stl::StlSpec &spec, stl::IndexSet I, int t, PendingCellMode mode) {
  const stl::IndexPartition part = stl::effective_indices(spec, t);
  stl::IndexSet expiring;
  for (int i : I.intersect(part.active_glob).members())
    if (spec.sub(i).b == t) expiring.insert(i);

  const std::vector<int> untils = I.intersect(part.active_until).members();
  std::vector<std::pair<typename B::Set, stl::IndexSet>> out;
  for (std::uint32_t mask = 0; mask < (1u << untils.size()); ++mask) {
    typename B::Set block = bk.domain_set();
    stl::IndexSet next = I.minus(expiring);
    bool dead = false;
    for (std::size_t j = 0; j < untils.size() && !dead; ++j) {
      const stl::SubFormula &f = spec.sub(untils[j]);
      geom::Region constraint;
      if (mask & (1u << j)) {
        constraint = geom::region_intersect(f.h1, f.h2);
        next.erase(untils[j]);
      } else if (mode == PendingCellMode::Relaxed) {
        constraint = f.h1;
      } else {
        constraint = geom::region_difference(f.h1, f.h2);
      }
      block = bk.intersect(block, bk.from_region(constraint));
      dead = bk.is_empty(block);
    }
    if (!dead) out.emplace_back(std::move(block), next);
  }
  return out;
}

}  // namespace detail

// Backward recursion for the feasible sets. Terminal instant: every active
// until must discharge now and every active invariant must hold. Earlier
// instants: a state is feasible iff it meets the invariant and until-progress
// constraints of some discharge pattern and has a successor (under some
// admissible input) feasible for the resulting pending set. Pending sets with
// an expired member are failed and map to the empty set at every instant.
template <class B>
FeasibleTable<B> compute_feasible_table(const B &bk, const stl::StlSpec &spec,
                                        PendingCellMode mode = PendingCellMode::Relaxed,
                                        std::size_t part_budget = 256) {
  if (bk.state_dim() != spec.state_dim)
    throw Error("spec and system dimensions disagree");
  FeasibleTable<B> tab;
  tab.spec = spec;
  tab.spec_hash = stl::spec_content_hash(spec);
  tab.horizon = spec.horizon;
  tab.mode = mode;
  const int T = spec.horizon;
  tab.layers.resize(static_cast<std::size_t>(T) + 1);

  const auto reach = reachable_index_sets_by_layer(bk, spec);
  const typename B::Set nothing = bk.from_region(geom::Region::empty(spec.state_dim));

  for (int t = T; t >= 0; --t) {
    const stl::IndexPartition part = stl::effective_indices(spec, t);
    for (stl::IndexSet I : reach[static_cast<std::size_t>(t)]) {
      typename B::Set value = nothing;
      try {
        if (!I.intersects(part.past)) {
          if (t == T) {
            value = bk.domain_set();
            for (int i : I.intersect(part.active_glob).members())
              value = bk.intersect(value, bk.from_region(spec.sub(i).h1));
            for (int i : I.intersect(part.active_until).members())
              value = bk.intersect(
                  value, bk.from_region(geom::region_intersect(spec.sub(i).h1, spec.sub(i).h2)));
          } else {
            typename B::Set invariant = bk.domain_set();
            for (int i : I.intersect(part.active_glob).members())
              invariant = bk.intersect(invariant, bk.from_region(spec.sub(i).h1));
            for (auto &[block, next] : detail::recursion_cells(bk, spec, I, t, mode)) {
              auto entry = tab.layers[static_cast<std::size_t>(t) + 1].find(next);
              // A missing successor entry means this discharge pattern occurs for
              // no state; any state in the block belongs to a smaller pending set
              // whose term subsumes its contribution.
              if (entry == tab.layers[static_cast<std::size_t>(t) + 1].end()) continue;
              typename B::Set term = bk.intersect(block, invariant);
              if (bk.is_empty(term)) continue;
              term = bk.intersect(term, bk.pre(entry->second));
              if (bk.is_empty(term)) continue;
              value = bk.unite(value, term);
            }
          }
          value = bk.compress(std::move(value), part_budget);
        }
      } catch (const BudgetError &e) {
        throw BudgetError(std::string(e.what()) + " while computing the feasible set at t=" +
                          std::to_string(t) + " I=" + I.str());
      }
      tab.layers[static_cast<std::size_t>(t)].emplace(I, std::move(value));
    }
  }
  return tab;
}

enum class PrefixClass { Feasible, Violated };

struct PrefixVerdict {
  PrefixClass verdict = PrefixClass::Feasible;
  int first_violation = -1;       // instant of the first infeasible state, or -1
  stl::IndexSet pending_end;      // pending set after the last checked instant
};

// Walks the trace from instant 0, tracking the pending set the way the update
// rule does, and reports the first instant whose state lies outside its
// feasible set. A prefix that never leaves the feasible sets can still be
// extended to a satisfying trace; one that does cannot.
template <class B>
PrefixVerdict classify_prefix(const B &bk, const FeasibleTable<B> &tab, const stl::Trace &trace) {
  if (trace.start != 0) throw Error("prefix classification requires a trace starting at 0");
  if (trace.end() > tab.horizon) throw Error("trace extends beyond the table horizon");
  if (!trace.states.empty() && static_cast<int>(trace.states[0].size()) != tab.spec.state_dim)
    throw Error("trace and table dimensions disagree");

  const auto seq = stl::induced_sequence_semantic(tab.spec, trace);
  PrefixVerdict v;
  const typename B::Set everything = bk.domain_set();
  for (int t = 0; t <= trace.end(); ++t) {
    const geom::Vec &x = trace.at(t);
    const stl::IndexSet I = seq[static_cast<std::size_t>(t)];
    if (!bk.contains_state(everything, x) || !bk.contains_state(tab.at(t, I), x)) {
      v.verdict = PrefixClass::Violated;
      v.first_violation = t;
      v.pending_end = I;
      return v;
    }
  }
  v.pending_end = seq.back();
  return v;
}

}  // namespace stmon::feasible
