#include "stmon/stl/semantics.hpp"

#include <algorithm>

namespace stmon::stl {

bool evaluate_trace(const StlSpec &spec, const Trace &trace) {
  for (const SubFormula &f : spec.subs)
    if (trace.start > f.a || trace.end() < f.b)
      throw Error("trace does not cover every spec window");
  for (const SubFormula &f : spec.subs) {
    if (f.op == Op::Globally) {
      for (int t = f.a; t <= f.b; ++t)
        if (!geom::region_contains_point(f.h1, trace.at(t))) return false;
    } else {
      bool witnessed = false;
      for (int t = f.a; t <= f.b; ++t) {
        const geom::Vec &x = trace.at(t);
        if (!geom::region_contains_point(f.h1, x)) break;
        if (geom::region_contains_point(f.h2, x)) {
          witnessed = true;
          break;
        }
      }
      if (!witnessed) return false;
    }
  }
  return true;
}

IndexSet update_index_set(const StlSpec &spec, IndexSet I, int t, const geom::Vec &x) {
  IndexSet next = I;
  for (int i : I.members()) {
    const SubFormula &f = spec.sub(i);
    if (t < f.a || t > f.b) continue;
    if (f.op == Op::Until) {
      if (geom::region_contains_point(f.h1, x) && geom::region_contains_point(f.h2, x))
        next.erase(i);
    } else if (t == f.b) {
      next.erase(i);
    }
  }
  return next;
}

std::vector<OutcomeCell> update_outcome_cells(const StlSpec &spec, IndexSet I, int t,
                                              const geom::Region &domain) {
  const IndexPartition part = effective_indices(spec, t);
  const IndexSet expiring_globs = [&] {
    IndexSet s;
    for (int i : I.intersect(part.active_glob).members())
      if (spec.sub(i).b == t) s.insert(i);
    return s;
  }();

  std::vector<OutcomeCell> cells;
  cells.push_back({domain, I.minus(expiring_globs)});
  for (int i : I.intersect(part.active_until).members()) {
    const geom::Region hit = geom::region_intersect(spec.sub(i).h1, spec.sub(i).h2);
    std::vector<OutcomeCell> split;
    split.reserve(cells.size() * 2);
    for (OutcomeCell &c : cells) {
      geom::Region in = geom::region_intersect(c.cell, hit);
      geom::Region out = geom::region_difference(c.cell, hit);
      if (!in.is_empty()) {
        IndexSet next = c.next;
        next.erase(i);
        split.push_back({std::move(in), next});
      }
      if (!out.is_empty()) split.push_back({std::move(out), c.next});
    }
    cells = std::move(split);
  }
  return cells;
}

StlSpec remaining_formula(const StlSpec &spec, IndexSet I, int t) {
  const IndexPartition part = effective_indices(spec, t);
  if (I.intersects(part.past))
    throw Error("pending set holds an index whose window already closed");
  StlSpec rest;
  rest.state_dim = spec.state_dim;
  for (int i = 1; i <= spec.count(); ++i) {
    const SubFormula &f = spec.sub(i);
    if (part.future.contains(i)) {
      rest.subs.push_back(f);
    } else if (I.contains(i)) {
      SubFormula g = f;
      g.a = t;
      rest.subs.push_back(std::move(g));
    }
  }
  std::stable_sort(rest.subs.begin(), rest.subs.end(),
                   [](const SubFormula &x, const SubFormula &y) { return x.a < y.a; });
  rest.horizon = t;
  for (const SubFormula &f : rest.subs) rest.horizon = std::max(rest.horizon, f.b);
  return rest;
}

std::vector<IndexSet> induced_sequence_semantic(const StlSpec &spec, const Trace &trace) {
  if (trace.start != 0) throw Error("induced sequence requires a trace starting at 0");
  const int len = static_cast<int>(trace.states.size());
  std::vector<IndexSet> seq(static_cast<std::size_t>(len) + 1);
  for (int k = 0; k <= len; ++k) {
    IndexSet s;
    for (int i = 1; i <= spec.count(); ++i) {
      const SubFormula &f = spec.sub(i);
      if (f.op == Op::Globally) {
        if (k <= f.b) s.insert(i);
        continue;
      }
      bool hit = false;
      for (int u = f.a; u <= std::min(k - 1, f.b) && !hit; ++u)
        hit = geom::region_contains_point(f.h1, trace.at(u)) &&
              geom::region_contains_point(f.h2, trace.at(u));
      if (!hit) s.insert(i);
    }
    seq[static_cast<std::size_t>(k)] = s;
  }
  return seq;
}

std::vector<IndexSet> induced_sequence_update(const StlSpec &spec, const Trace &trace) {
  if (trace.start != 0) throw Error("induced sequence requires a trace starting at 0");
  std::vector<IndexSet> seq;
  seq.reserve(trace.states.size() + 1);
  IndexSet cur = IndexSet::all(spec.count());
  seq.push_back(cur);
  for (int k = 0; k < static_cast<int>(trace.states.size()); ++k) {
    cur = update_index_set(spec, cur, k, trace.at(k));
    seq.push_back(cur);
  }
  return seq;
}

}  // namespace stmon::stl
