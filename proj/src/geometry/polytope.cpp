// Exact set algebra on unions of convex polytopes. Every predicate bottoms out in
// the simplex feasibility check; no vertex enumeration anywhere.

#include "stmon/geometry/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "stmon/error.hpp"

namespace stmon::geom {

namespace {

double norm2(const Vec &v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Scales a halfspace to unit normal; zero rows are left alone (handled by callers).
// Already-unit rows are returned untouched so the cleanup is idempotent bit for bit.
Halfspace normalized(Halfspace h) {
  double n = norm2(h.normal);
  if (n > 0.0 && std::fabs(n - 1.0) > 1e-12) {
    for (double &v : h.normal) v /= n;
    h.offset /= n;
  }
  return h;
}

bool same_direction(const Vec &a, const Vec &b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::fabs(a[i] - b[i]) > tol) return false;
  return true;
}

// Syntactic cleanup: normalize rows, drop trivially true rows, detect trivially
// false rows (returns false), and keep only the tightest of same-normal rows.
bool clean_facets(std::vector<Halfspace> &facets) {
  std::vector<Halfspace> out;
  out.reserve(facets.size());
  for (Halfspace &h : facets) {
    double mx = 0.0;
    for (double v : h.normal) mx = std::max(mx, std::fabs(v));
    if (mx < 1e-14) {
      if (h.offset < -kFeasEps) return false;
      continue;
    }
    Halfspace n = normalized(std::move(h));
    bool merged = false;
    for (Halfspace &k : out) {
      if (same_direction(k.normal, n.normal, 1e-12)) {
        k.offset = std::min(k.offset, n.offset);
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(std::move(n));
  }
  facets = std::move(out);
  return true;
}

ConvexPolytope intersect_parts(const ConvexPolytope &p, const ConvexPolytope &q) {
  ConvexPolytope r{p.dim, p.facets};
  r.facets.insert(r.facets.end(), q.facets.begin(), q.facets.end());
  return r;
}

// Splits closure(p \ q) into closed pieces (one-facet-at-a-time carving). A piece
// is kept only when its open counterpart {n.x > off} meets the base polytope; the
// base is convex, so the closed piece is then exactly the closure of the open one.
// Early exit: with `first_only`, returns as soon as one piece survives.
std::vector<ConvexPolytope> carve(const ConvexPolytope &p, const ConvexPolytope &q,
                                  bool first_only) {
  std::vector<ConvexPolytope> pieces;
  if (q.facets.empty()) return pieces;  // q is everything, difference empty
  ConvexPolytope base{p.dim, p.facets};
  for (const Halfspace &h : q.facets) {
    std::vector<Halfspace> capped = base.facets;
    capped.push_back({h.normal, h.offset + 1.0});
    LpResult r = lp_maximize(h.normal, capped, p.dim);
    if (r.status == LpStatus::Optimal && r.value > h.offset + kFeasEps) {
      ConvexPolytope piece = base;
      Halfspace neg{h.normal, -h.offset};
      for (double &v : neg.normal) v = -v;
      piece.facets.push_back(neg);
      pieces.push_back(std::move(piece));
      if (first_only) return pieces;
    }
    base.facets.push_back(h);
  }
  return pieces;
}

// Subtracts every part of b from the single polytope p.
// With `first_only`, stops at the first surviving piece (subset testing).
std::vector<ConvexPolytope> subtract_all(const ConvexPolytope &p, const Region &b,
                                         bool first_only) {
  std::vector<ConvexPolytope> pieces{p};
  for (const ConvexPolytope &q : b.parts) {
    std::vector<ConvexPolytope> next;
    for (const ConvexPolytope &piece : pieces) {
      if (polytope_is_empty(intersect_parts(piece, q))) {
        next.push_back(piece);  // q does not touch this piece
        continue;
      }
      std::vector<ConvexPolytope> sub = carve(piece, q, false);
      next.insert(next.end(), sub.begin(), sub.end());
    }
    pieces = std::move(next);
    if (pieces.empty()) return pieces;
  }
  if (first_only && !pieces.empty()) pieces.resize(1);
  return pieces;
}

}  // namespace

bool ConvexPolytope::contains(const Vec &x, double eps) const {
  for (const Halfspace &h : facets) {
    double n = norm2(h.normal);
    double slack = dot(h.normal, x) - h.offset;
    if (n > 0.0) slack /= n;
    if (slack > eps) return false;
  }
  return true;
}

Region Region::box(const std::vector<std::pair<double, double>> &bounds) {
  const int dim = static_cast<int>(bounds.size());
  ConvexPolytope p{dim, {}};
  for (int i = 0; i < dim; ++i) {
    Vec e(dim, 0.0);
    e[i] = 1.0;
    p.facets.push_back({e, bounds[i].second});
    for (double &v : e) v = -v;
    p.facets.push_back({e, -bounds[i].first});
  }
  return from_parts(dim, {std::move(p)});
}

Region Region::point(const Vec &x) {
  const int dim = static_cast<int>(x.size());
  ConvexPolytope p{dim, {}};
  for (int i = 0; i < dim; ++i) {
    Vec e(dim, 0.0);
    e[i] = 1.0;
    p.facets.push_back({e, x[i]});
    for (double &v : e) v = -v;
    p.facets.push_back({e, -x[i]});
  }
  return Region{dim, {std::move(p)}};
}

Region Region::from_parts(int dim, std::vector<ConvexPolytope> parts) {
  Region r{dim, {}};
  for (ConvexPolytope &p : parts) {
    if (!clean_facets(p.facets)) continue;
    if (!polytope_is_empty(p)) r.parts.push_back(std::move(p));
  }
  return r;
}

bool polytope_is_empty(const ConvexPolytope &p) {
  return !lp_feasible(p.facets, p.dim);
}

bool polytope_subset(const ConvexPolytope &p, const ConvexPolytope &q) {
  for (const Halfspace &raw : q.facets) {
    Halfspace h = normalized(raw);
    double n = norm2(h.normal);
    if (n == 0.0) {
      if (h.offset >= -kFeasEps) continue;   // trivially true facet
      return polytope_is_empty(p);           // q is empty
    }
    LpResult r = lp_maximize(h.normal, p.facets, p.dim);
    if (r.status == LpStatus::Infeasible) return true;  // p empty
    if (r.status == LpStatus::Unbounded) return false;
    if (r.value > h.offset + kFeasEps) return false;
  }
  return true;
}

ConvexPolytope prune_facets(const ConvexPolytope &p) {
  ConvexPolytope out = p;
  if (!clean_facets(out.facets)) return out;  // caller guarantees non-empty anyway
  std::size_t i = 0;
  while (i < out.facets.size() && out.facets.size() > 1) {
    Halfspace h = out.facets[i];
    std::vector<Halfspace> rest;
    rest.reserve(out.facets.size());
    for (std::size_t j = 0; j < out.facets.size(); ++j)
      if (j != i) rest.push_back(out.facets[j]);
    // Cap the objective so the test LP is never unbounded.
    rest.push_back({h.normal, h.offset + 1.0});
    LpResult r = lp_maximize(h.normal, rest, out.dim);
    if (r.status == LpStatus::Optimal && r.value <= h.offset + kFeasEps) {
      out.facets.erase(out.facets.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  return out;
}

Region region_intersect(const Region &a, const Region &b) {
  Region r{a.dim, {}};
  for (const ConvexPolytope &p : a.parts)
    for (const ConvexPolytope &q : b.parts) {
      ConvexPolytope cand = intersect_parts(p, q);
      if (!clean_facets(cand.facets)) continue;
      if (!polytope_is_empty(cand)) r.parts.push_back(std::move(cand));
    }
  return r;
}

Region region_union(const Region &a, const Region &b) {
  Region r = a;
  r.parts.insert(r.parts.end(), b.parts.begin(), b.parts.end());
  // Cheap hygiene only: drop parts contained in another single part.
  CompressOptions opts;
  opts.exact_threshold = std::numeric_limits<std::size_t>::max();
  return region_compress(std::move(r), opts);
}

Region region_difference(const Region &a, const Region &b) {
  Region r{a.dim, {}};
  for (const ConvexPolytope &p : a.parts) {
    std::vector<ConvexPolytope> pieces = subtract_all(p, b, false);
    for (ConvexPolytope &piece : pieces) {
      if (clean_facets(piece.facets)) r.parts.push_back(std::move(piece));
    }
  }
  CompressOptions opts;
  opts.exact_threshold = std::numeric_limits<std::size_t>::max();
  return region_compress(std::move(r), opts);
}

bool region_is_empty(const Region &r) {
  for (const ConvexPolytope &p : r.parts)
    if (!polytope_is_empty(p)) return false;
  return true;
}

bool region_is_subset(const Region &a, const Region &b) {
  if (b.parts.size() == 1) {
    for (const ConvexPolytope &p : a.parts)
      if (!polytope_subset(p, b.parts[0])) return false;
    return true;
  }
  for (const ConvexPolytope &p : a.parts) {
    if (polytope_is_empty(p)) continue;
    if (!subtract_all(p, b, true).empty()) return false;
  }
  return true;
}

bool region_equal(const Region &a, const Region &b) {
  return region_is_subset(a, b) && region_is_subset(b, a);
}

bool region_contains_point(const Region &r, const Vec &x, double eps) {
  for (const ConvexPolytope &p : r.parts)
    if (p.contains(x, eps)) return true;
  return false;
}

Region region_compress(Region r, const CompressOptions &opts) {
  // Stage 1: empties out, facets pruned.
  std::vector<ConvexPolytope> parts;
  parts.reserve(r.parts.size());
  for (ConvexPolytope &p : r.parts) {
    if (!clean_facets(p.facets)) continue;
    if (polytope_is_empty(p)) continue;
    parts.push_back(prune_facets(p));
  }

  // Stage 2: drop parts contained in another kept part.
  std::vector<char> dead(parts.size(), 0);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (dead[i]) continue;
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (i == j || dead[j]) continue;
      if (polytope_subset(parts[i], parts[j])) { dead[i] = 1; break; }
    }
  }
  std::vector<ConvexPolytope> kept;
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (!dead[i]) kept.push_back(std::move(parts[i]));

  // Stage 3: exact pass, drop parts covered by the union of the others.
  if (kept.size() > opts.exact_threshold) {
    std::size_t i = 0;
    while (i < kept.size()) {
      Region others{r.dim, {}};
      for (std::size_t j = 0; j < kept.size(); ++j)
        if (j != i) others.parts.push_back(kept[j]);
      if (subtract_all(kept[i], others, true).empty()) {
        kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
  }

  if (opts.part_budget && kept.size() > opts.part_budget) {
    throw BudgetError("region exceeds part budget (" + std::to_string(kept.size()) +
                      " > " + std::to_string(opts.part_budget) + ")");
  }
  return Region{r.dim, std::move(kept)};
}

std::vector<std::pair<double, double>> region_bounding_box(const Region &r) {
  std::vector<std::pair<double, double>> box;
  if (r.parts.empty()) return box;
  const double inf = std::numeric_limits<double>::infinity();
  box.assign(static_cast<std::size_t>(r.dim), {inf, -inf});
  for (const ConvexPolytope &p : r.parts) {
    for (int i = 0; i < r.dim; ++i) {
      Vec e(r.dim, 0.0);
      e[i] = 1.0;
      LpResult hi = lp_maximize(e, p.facets, p.dim);
      e[i] = -1.0;
      LpResult lo = lp_maximize(e, p.facets, p.dim);
      if (hi.status == LpStatus::Infeasible) continue;
      double hiv = hi.status == LpStatus::Unbounded ? inf : hi.value;
      double lov = lo.status == LpStatus::Unbounded ? -inf : -lo.value;
      box[i].first = std::min(box[i].first, lov);
      box[i].second = std::max(box[i].second, hiv);
    }
  }
  return box;
}

std::uint64_t region_content_hash(const Region &r) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  auto mixd = [&mix](double d) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(d));
    std::memcpy(&bits, &d, sizeof(bits));
    mix(bits);
  };
  mix(static_cast<std::uint64_t>(r.dim));
  mix(static_cast<std::uint64_t>(r.parts.size()));
  for (const ConvexPolytope &p : r.parts) {
    mix(static_cast<std::uint64_t>(p.facets.size()));
    for (const Halfspace &f : p.facets) {
      for (double v : f.normal) mixd(v);
      mixd(f.offset);
    }
  }
  return h;
}

}  // namespace stmon::geom
