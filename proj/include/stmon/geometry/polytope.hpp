#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "stmon/geometry/lp.hpp"

namespace stmon::geom {

// Closed convex polytope as a facet list. An empty facet list denotes all of R^dim.
struct ConvexPolytope {
  int dim = 0;
  std::vector<Halfspace> facets;

  bool contains(const Vec &x, double eps = kFeasEps) const;
};

// Finite union of convex polytopes. Normalized: no member part is empty, so an
// empty part list is exactly the empty set.
struct Region {
  int dim = 0;
  std::vector<ConvexPolytope> parts;

  bool is_empty() const { return parts.empty(); }

  static Region empty(int dim) { return Region{dim, {}}; }
  static Region full(int dim) { return Region{dim, {ConvexPolytope{dim, {}}}}; }
  // Axis-aligned box; an inverted interval yields the empty region.
  static Region box(const std::vector<std::pair<double, double>> &bounds);
  // Degenerate singleton {x}.
  static Region point(const Vec &x);
  // Drops empty parts; the only sanctioned way to build a Region from raw parts.
  static Region from_parts(int dim, std::vector<ConvexPolytope> parts);
};

bool polytope_is_empty(const ConvexPolytope &p);
// p <= q at kFeasEps tolerance; an empty p is a subset of anything.
bool polytope_subset(const ConvexPolytope &p, const ConvexPolytope &q);
// Removes redundant facets (duplicate rows, then LP feasibility-of-negation).
// Precondition: p is non-empty.
ConvexPolytope prune_facets(const ConvexPolytope &p);

Region region_intersect(const Region &a, const Region &b);
Region region_union(const Region &a, const Region &b);
// Closure convention: returns the closure of a \ b, built from closed complements.
Region region_difference(const Region &a, const Region &b);
bool region_is_empty(const Region &r);
// True iff a \ b is empty (difference with early exit; single-part b uses facet LPs).
bool region_is_subset(const Region &a, const Region &b);
bool region_equal(const Region &a, const Region &b);
bool region_contains_point(const Region &r, const Vec &x, double eps = kFeasEps);

struct CompressOptions {
  // Run the exact covered-by-the-union pass only when more parts than this survive
  // the cheap stages; 0 forces it, SIZE_MAX disables it.
  std::size_t exact_threshold = 24;
  // Hard cap on surviving parts; exceeding it raises BudgetError. 0 = unlimited.
  std::size_t part_budget = 0;
};

// Union-preserving cleanup: drops empty parts, facet-prunes the rest, removes parts
// contained in another part, and (optionally) parts covered by the union of the rest.
Region region_compress(Region r, const CompressOptions &opts = {});

// Per-coordinate bounds; +-infinity marks unbounded directions. Empty region
// yields an empty vector.
std::vector<std::pair<double, double>> region_bounding_box(const Region &r);

// Structural content hash (FNV-1a over facet numerics), used for spec digests.
std::uint64_t region_content_hash(const Region &r);

}  // namespace stmon::geom
