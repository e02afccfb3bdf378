#include "stmon/oracle/oracle.hpp"

#include <algorithm>
#include <random>

namespace stmon::oracle {

namespace {

using backend::CellSet;
using backend::GridSystem;
using stl::IndexSet;
using stl::StlSpec;
using stl::Trace;

long long saturating_add(long long a, long long b, long long cap) {
  return a > cap - b ? cap + 1 : a + b;
}

// Depth-first search over suffix paths with an early exit on success.
// `states` already holds the trace states up to instant `u`.
bool dfs_satisfies(const StlSpec &rest, const GridSystem &g, int cell, int u, int horizon,
                   Trace &acc) {
  acc.states.push_back(g.rep(cell));
  bool ok;
  if (u == horizon) {
    ok = stl::evaluate_trace(rest, acc);
  } else {
    ok = false;
    for (int next : g.succ[static_cast<std::size_t>(cell)]) {
      if (dfs_satisfies(rest, g, next, u + 1, horizon, acc)) {
        ok = true;
        break;
      }
    }
  }
  acc.states.pop_back();
  return ok;
}

bool dfs_fails(const StlSpec &spec, const GridSystem &g, int cell, int u, int horizon,
               Trace &acc) {
  acc.states.push_back(g.rep(cell));
  bool found;
  if (u == horizon) {
    found = !stl::evaluate_trace(spec, acc);
  } else {
    found = false;
    for (int next : g.succ[static_cast<std::size_t>(cell)]) {
      if (dfs_fails(spec, g, next, u + 1, horizon, acc)) {
        found = true;
        break;
      }
    }
  }
  acc.states.pop_back();
  return found;
}

void check_budget(const GridSystem &g, int from, int t, int horizon, long long budget) {
  auto counts = path_counts(g, horizon, budget);
  if (counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(from)] > budget)
    throw BudgetError("path enumeration budget exceeded");
}

}  // namespace

std::vector<std::vector<long long>> path_counts(const GridSystem &g, int horizon,
                                                long long budget) {
  std::vector<std::vector<long long>> counts(static_cast<std::size_t>(horizon) + 1,
                                             std::vector<long long>(g.cells.size(), 1));
  for (int t = horizon - 1; t >= 0; --t)
    for (int c = 0; c < g.size(); ++c) {
      long long total = 0;
      for (int next : g.succ[static_cast<std::size_t>(c)])
        total = saturating_add(total, counts[static_cast<std::size_t>(t) + 1][static_cast<std::size_t>(next)],
                               budget);
      counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)] = total;
    }
  return counts;
}

std::vector<std::vector<int>> enumerate_paths(const GridSystem &g, int from, int t0, int t1,
                                              std::size_t max_count) {
  std::vector<std::vector<int>> out;
  std::vector<int> path{from};
  // Iterative lexicographic DFS over successor choices.
  std::vector<std::size_t> choice;
  while (true) {
    if (static_cast<int>(path.size()) == t1 - t0 + 1) {
      out.push_back(path);
      if (max_count && out.size() >= max_count) return out;
      // backtrack to the next unexplored branch
      while (!choice.empty()) {
        path.pop_back();
        std::size_t &k = choice.back();
        const auto &succ = g.succ[static_cast<std::size_t>(path.back())];
        if (++k < succ.size()) {
          path.push_back(succ[k]);
          break;
        }
        choice.pop_back();
      }
      if (choice.empty()) return out;
    } else {
      const auto &succ = g.succ[static_cast<std::size_t>(path.back())];
      choice.push_back(0);
      path.push_back(succ[0]);
    }
  }
}

Trace trace_of_path(const GridSystem &g, const std::vector<int> &path, int start) {
  Trace tr;
  tr.start = start;
  for (int c : path) tr.states.push_back(g.rep(c));
  return tr;
}

CellSet oracle_feasible(const StlSpec &spec, const GridSystem &g, int t, IndexSet I,
                        long long path_budget) {
  CellSet out;
  if (I.intersects(stl::effective_indices(spec, t).past)) return out;
  const StlSpec rest = stl::remaining_formula(spec, I, t);
  auto counts = path_counts(g, spec.horizon, path_budget);
  for (int c = 0; c < g.size(); ++c) {
    if (counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)] > path_budget)
      throw BudgetError("path enumeration budget exceeded");
    Trace acc;
    acc.start = t;
    if (dfs_satisfies(rest, g, c, t, spec.horizon, acc)) out.cells.push_back(c);
  }
  return out;
}

bool oracle_prefix_feasible(const StlSpec &spec, const GridSystem &g, const Trace &prefix,
                            long long path_budget) {
  if (prefix.start != 0 || prefix.states.empty())
    throw Error("prefix classification requires a trace starting at 0");
  const int t = prefix.end();
  if (t > spec.horizon) throw Error("prefix extends beyond the horizon");
  if (t == spec.horizon) return stl::evaluate_trace(spec, prefix);
  int last = g.cell_of(prefix.at(t));
  if (last < 0) return false;
  check_budget(g, last, t, spec.horizon, path_budget);
  Trace acc = prefix;
  acc.states.pop_back();  // the DFS re-adds the cell it starts from
  return dfs_satisfies(spec, g, last, t, spec.horizon, acc);
}

std::vector<std::pair<int, IndexSet>> oracle_consistent_beliefs(
    const StlSpec &spec, const GridSystem &g, const monitor::ObservationHistory &h,
    long long path_budget) {
  if (h.states.empty()) throw Error("empty observation history");
  const std::vector<int> instants = h.instants();
  const int last_instant = instants.back();
  std::vector<int> observed(static_cast<std::size_t>(last_instant) + 1, -1);
  for (std::size_t k = 0; k < instants.size(); ++k) {
    int c = g.cell_of(h.states[k]);
    if (c < 0) throw Error("observed state matches no grid cell");
    observed[static_cast<std::size_t>(instants[k])] = c;
  }
  const int root = observed[0];
  check_budget(g, root, 0, last_instant, path_budget);

  std::vector<std::pair<int, IndexSet>> out;
  std::vector<int> path{root};
  // Enumerate every path matching the observations (mismatching branches are
  // skipped; they contribute nothing to the filtered set).
  std::function<void()> walk = [&] {
    const int u = static_cast<int>(path.size()) - 1;
    if (observed[static_cast<std::size_t>(u)] >= 0 &&
        path.back() != observed[static_cast<std::size_t>(u)])
      return;
    if (u == last_instant) {
      Trace tr = trace_of_path(g, path, 0);
      // A belief at instant u reflects the updates of instants before u only,
      // so read the induced sequence at u, not after it.
      const auto seq = stl::induced_sequence_semantic(spec, tr);
      out.emplace_back(path.back(), seq[static_cast<std::size_t>(last_instant)]);
      return;
    }
    for (int next : g.succ[static_cast<std::size_t>(path.back())]) {
      path.push_back(next);
      walk();
      path.pop_back();
    }
  };
  walk();
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const CellSet &OracleFeasibleCache::get(int t, IndexSet I) {
  auto key = std::make_pair(t, I.raw());
  auto it = cache_.find(key);
  if (it == cache_.end())
    it = cache_.emplace(key, oracle_feasible(spec_, g_, t, I, budget_)).first;
  return it->second;
}

OracleTrigger oracle_trigger_time(const StlSpec &spec, const GridSystem &g,
                                  OracleFeasibleCache &feasible,
                                  std::vector<std::pair<int, IndexSet>> pairs, int t,
                                  int t_max) {
  OracleTrigger result;
  const int K = std::min(t_max, spec.horizon - t);
  int best = -1;
  for (int k = 1; k <= K; ++k) {
    // One transition step: the index update reads the pre-step state.
    std::vector<std::pair<int, IndexSet>> stepped;
    for (const auto &[c, I] : pairs) {
      IndexSet next = stl::update_index_set(spec, I, t + k - 1, g.rep(c));
      for (int d : g.succ[static_cast<std::size_t>(c)]) stepped.emplace_back(d, next);
    }
    std::sort(stepped.begin(), stepped.end());
    stepped.erase(std::unique(stepped.begin(), stepped.end()), stepped.end());
    pairs = std::move(stepped);

    const int u = t + k;
    bool safe = true;
    for (const auto &[c, I] : pairs)
      if (!feasible.get(u, I).contains(c)) {
        safe = false;
        break;
      }
    if (!safe) break;

    bool determined = true;
    for (std::size_t a = 0; a < pairs.size() && determined; ++a)
      for (std::size_t b = a + 1; b < pairs.size() && determined; ++b) {
        if (pairs[a].first != pairs[b].first) continue;
        const geom::Vec &x = g.rep(pairs[a].first);
        determined = stl::update_index_set(spec, pairs[a].second, u, x) ==
                     stl::update_index_set(spec, pairs[b].second, u, x);
      }
    if (determined) best = k;
  }
  if (best > 0) {
    result.tau = best;
  } else {
    result.tau = 1;
    result.determined_set_empty = true;
  }
  return result;
}

bool has_satisfying_path(const StlSpec &spec, const GridSystem &g, long long path_budget) {
  check_budget(g, g.initial, 0, spec.horizon, path_budget);
  Trace acc;
  acc.start = 0;
  return dfs_satisfies(spec, g, g.initial, 0, spec.horizon, acc);
}

bool has_failing_path(const StlSpec &spec, const GridSystem &g, long long path_budget) {
  check_budget(g, g.initial, 0, spec.horizon, path_budget);
  Trace acc;
  acc.start = 0;
  return dfs_fails(spec, g, g.initial, 0, spec.horizon, acc);
}

Instance random_instance(std::uint64_t seed, const InstanceParams &params) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
  auto pick = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  Instance inst;
  GridSystem &g = inst.grid;
  const int m = pick(8, std::min(params.max_cells, 32));
  for (int c = 0; c < m; ++c) g.cells.push_back(geom::Vec{static_cast<double>(c)});
  g.domain = geom::Region::box({{-0.5, m - 0.5}});
  g.succ.resize(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) {
    int roll = pick(0, 9);
    int fanout = roll < 4 ? 1 : (roll < 8 ? 2 : std::min(3, params.max_branching));
    std::vector<int> &s = g.succ[static_cast<std::size_t>(c)];
    while (static_cast<int>(s.size()) < fanout) {
      int target = pick(0, m - 1);
      if (std::find(s.begin(), s.end(), target) == s.end()) s.push_back(target);
    }
    std::sort(s.begin(), s.end());
  }
  g.initial = pick(0, m - 1);

  // Cell-aligned box region over [lo, hi] cells, with half-integer bounds so no
  // representative ever sits on a boundary.
  auto cell_box = [&](int lo, int hi) {
    return geom::Region::box({{lo - 0.5, hi + 0.5}});
  };
  auto random_box = [&](double min_frac, double max_frac) {
    int w = std::max(1, static_cast<int>(m * (min_frac + (max_frac - min_frac) *
                                                             (static_cast<double>(rng() % 1000) / 999.0))));
    w = std::min(w, m);
    int lo = pick(0, m - w);
    return std::make_pair(lo, lo + w - 1);
  };

  StlSpec &spec = inst.spec;
  spec.state_dim = 1;
  const int n = pick(1, params.max_subs);
  std::vector<bool> is_until(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) is_until[static_cast<std::size_t>(i)] = pick(0, 1) == 1;
  if (n >= 2) {
    is_until[0] = true;   // at least one until
    is_until[1] = false;  // and one invariant
    for (int i = n - 1; i > 0; --i) {
      int j = pick(0, i);
      std::swap(is_until[static_cast<std::size_t>(i)], is_until[static_cast<std::size_t>(j)]);
    }
  }
  const int cap = params.max_horizon;
  for (int i = 0; i < n; ++i) {
    int a = pick(0, cap - 2);
    int b = pick(a + 1, cap);
    stl::SubFormula f;
    f.a = a;
    f.b = b;
    if (is_until[static_cast<std::size_t>(i)]) {
      f.op = stl::Op::Until;
      auto [hlo, hhi] = random_box(0.45, 0.9);
      f.h1 = cell_box(hlo, hhi);
      if (pick(0, 9) < 7) {
        // target nested in the hold set, so discharging while holding is possible
        int w = std::max(1, (hhi - hlo + 1) / 2);
        int lo = pick(hlo, hhi - w + 1);
        f.h2 = cell_box(lo, lo + w - 1);
      } else {
        auto [tlo, thi] = random_box(0.15, 0.5);
        f.h2 = cell_box(tlo, thi);
      }
    } else {
      f.op = stl::Op::Globally;
      auto [hlo, hhi] = random_box(0.55, 0.95);
      f.h1 = cell_box(hlo, hhi);
      f.h2 = geom::Region::empty(1);
    }
    spec.subs.push_back(std::move(f));
  }
  std::stable_sort(spec.subs.begin(), spec.subs.end(),
                   [](const stl::SubFormula &x, const stl::SubFormula &y) { return x.a < y.a; });
  spec.horizon = 0;
  for (const stl::SubFormula &f : spec.subs) spec.horizon = std::max(spec.horizon, f.b);
  if (spec.horizon < 2) {
    // keep room for a non-trivial silence bound
    spec.subs.back().b = 2;
    spec.horizon = 2;
  }

  inst.t_max = pick(1, std::min(params.max_silence, spec.horizon - 1));

  // Keep exhaustive queries inside the per-query budget: drop successors (never
  // below one) until the worst-case path count fits.
  while (true) {
    auto counts = path_counts(g, spec.horizon, params.path_budget);
    long long worst = 0;
    int worst_cell = -1;
    for (int c = 0; c < m; ++c) {
      long long v = counts[0][static_cast<std::size_t>(c)];
      if (v > worst && g.succ[static_cast<std::size_t>(c)].size() > 1) {
        worst = v;
        worst_cell = c;
      }
    }
    long long overall = 0;
    for (int c = 0; c < m; ++c) overall = std::max(overall, counts[0][static_cast<std::size_t>(c)]);
    if (overall <= params.path_budget || worst_cell < 0) break;
    g.succ[static_cast<std::size_t>(worst_cell)].pop_back();
  }
  return inst;
}

}  // namespace stmon::oracle
