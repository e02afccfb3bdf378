#pragma once

#include "stmon/feasible/table.hpp"

namespace stmon::monitor {

// Everything the monitor can know about the plant between observations: the
// possible (state set, pending index set) explanations of the history so far.
// Canonical form: at most one pair per index set, no empty sets.
template <class B>
struct Belief {
  std::vector<std::pair<typename B::Set, stl::IndexSet>> pairs;

  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }
};

template <class B>
Belief<B> belief_initial(const B &bk, const stl::StlSpec &spec, const geom::Vec &x0) {
  Belief<B> b;
  b.pairs.emplace_back(bk.singleton(x0), stl::IndexSet::all(spec.count()));
  return b;
}

// Restriction to an observed state: explanations not containing x are dropped,
// the surviving ones collapse to the singleton {x}. An empty result means the
// observation is inconsistent with the model (a fault upstream).
template <class B>
Belief<B> belief_refine(const B &bk, const Belief<B> &b, const geom::Vec &x) {
  Belief<B> out;
  for (const auto &[set, I] : b.pairs)
    if (bk.contains_state(set, x)) out.pairs.emplace_back(bk.singleton(x), I);
  return out;
}

// One open-loop step from instant t to t+1: each explanation is split by the
// update partition at t (index bookkeeping uses the pre-step state), then mapped
// through the successor image under every admissible input. Same-index results
// merge, keeping the belief canonical.
template <class B>
Belief<B> belief_predict_one(const B &bk, const stl::StlSpec &spec, const Belief<B> &b, int t,
                             std::size_t part_budget = 0) {
  std::map<stl::IndexSet, typename B::Set> acc;
  for (const auto &[set, I] : b.pairs) {
    for (auto &[cell, next] : feasible::backend_update_cells(bk, spec, I, t)) {
      typename B::Set piece = bk.intersect(set, cell);
      if (bk.is_empty(piece)) continue;
      piece = bk.post(piece);
      if (bk.is_empty(piece)) continue;
      auto it = acc.find(next);
      if (it == acc.end()) acc.emplace(next, std::move(piece));
      else it->second = bk.unite(it->second, piece);
    }
  }
  Belief<B> out;
  for (auto &[I, set] : acc)
    out.pairs.emplace_back(bk.compress(std::move(set), part_budget), I);
  return out;
}

template <class B>
Belief<B> belief_predict(const B &bk, const stl::StlSpec &spec, Belief<B> b, int t, int k,
                         std::size_t part_budget = 0) {
  for (int j = 0; j < k; ++j) b = belief_predict_one(bk, spec, b, t + j, part_budget);
  return b;
}

// Safe at instant t: every explanation lies inside its feasible set, so no
// consistent run has already failed.
template <class B>
bool belief_is_safe(const B &bk, const feasible::FeasibleTable<B> &tab, const Belief<B> &b,
                    int t) {
  for (const auto &[set, I] : b.pairs)
    if (!bk.is_subset(set, tab.at(t, I))) return false;
  return true;
}

// Determined at instant t: explanations sharing a state always agree on the
// next pending set, i.e. differing update outcomes never overlap in state
// space across two belief pairs.
template <class B>
bool belief_is_determined(const B &bk, const stl::StlSpec &spec, const Belief<B> &b, int t) {
  if (b.pairs.size() <= 1) return true;
  std::vector<std::vector<std::pair<typename B::Set, stl::IndexSet>>> cells;
  cells.reserve(b.pairs.size());
  for (const auto &[set, I] : b.pairs)
    cells.push_back(feasible::backend_update_cells(bk, spec, I, t));
  for (std::size_t j = 0; j < b.pairs.size(); ++j) {
    for (std::size_t k = j + 1; k < b.pairs.size(); ++k) {
      typename B::Set shared = bk.intersect(b.pairs[j].first, b.pairs[k].first);
      if (bk.is_empty(shared)) continue;
      for (const auto &[cj, ij] : cells[j]) {
        typename B::Set both = bk.intersect(shared, cj);
        if (bk.is_empty(both)) continue;
        for (const auto &[ck, ik] : cells[k]) {
          if (ij == ik) continue;
          if (!bk.is_empty(bk.intersect(both, ck))) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace stmon::monitor
