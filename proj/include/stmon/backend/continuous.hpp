#pragma once

#include "stmon/geometry/affine.hpp"

namespace stmon::backend {

// Backend contract (compile-time duck typing shared by the feasible-set table,
// the belief machinery and the monitors):
//   using Set;                                       set-of-states representation
//   int state_dim() const;
//   Set domain_set() const;                          the whole state domain
//   const geom::Region &domain_region() const;       same, as a geometric region
//   Set from_region(const geom::Region &) const;     domain-restricted conversion
//   Set intersect(const Set &, const Set &) const;
//   Set unite(const Set &, const Set &) const;
//   bool is_empty(const Set &) const;
//   bool is_subset(const Set &, const Set &) const;
//   bool set_equal(const Set &, const Set &) const;
//   bool contains_state(const Set &, const geom::Vec &) const;
//   Set singleton(const geom::Vec &) const;
//   Set pre(const Set &) const;    states with SOME admissible input into the set
//   Set post(const Set &) const;   successors under EVERY admissible input
//   Set compress(Set, std::size_t part_budget) const;  canonical cleanup, 0 = no cap

// Exact polytope-union backend over an affine system x+ = Ax + Bu + c.
// Observed states enter as tiny boxes rather than true points: images of a
// point under the dynamics are lower-dimensional, and keeping the exact
// trajectory inside a measure-zero set across chained projections is
// numerically hopeless. The margin is far above the solver tolerance and far
// below any model scale, and it only ever enlarges the belief.
struct ContinuousBackend {
  using Set = geom::Region;

  static constexpr double kObservationMargin = 1e-6;

  geom::AffineSystem sys;

  int state_dim() const { return sys.state_dim(); }
  Set domain_set() const { return sys.domain; }
  const geom::Region &domain_region() const { return sys.domain; }

  Set from_region(const geom::Region &r) const { return geom::region_intersect(r, sys.domain); }
  Set intersect(const Set &a, const Set &b) const { return geom::region_intersect(a, b); }
  Set unite(const Set &a, const Set &b) const { return geom::region_union(a, b); }
  bool is_empty(const Set &s) const { return s.is_empty(); }
  bool is_subset(const Set &a, const Set &b) const { return geom::region_is_subset(a, b); }
  bool set_equal(const Set &a, const Set &b) const { return geom::region_equal(a, b); }
  bool contains_state(const Set &s, const geom::Vec &x) const {
    return geom::region_contains_point(s, x);
  }
  Set singleton(const geom::Vec &x) const {
    std::vector<std::pair<double, double>> bounds;
    bounds.reserve(x.size());
    for (double v : x) bounds.emplace_back(v - kObservationMargin, v + kObservationMargin);
    return geom::region_intersect(geom::Region::box(bounds), sys.domain);
  }

  Set pre(const Set &target) const { return geom::pre_image(sys, target); }
  Set post(const Set &start) const { return geom::post_image(sys, start); }

  Set compress(Set s, std::size_t part_budget) const {
    geom::CompressOptions opts;
    opts.part_budget = part_budget;
    return geom::region_compress(std::move(s), opts);
  }
};

}  // namespace stmon::backend
