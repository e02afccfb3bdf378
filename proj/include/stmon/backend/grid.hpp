#pragma once

#include <vector>

#include "stmon/geometry/polytope.hpp"

namespace stmon::backend {

// Finite transition system whose cells are embedded as representative points, so
// the same formula regions apply to both backends. Representatives are placed
// away from any region boundary the generator emits (integer coordinates against
// half-integer box bounds), which keeps membership tests exact.
struct GridSystem {
  std::vector<geom::Vec> cells;        // representative point per cell
  std::vector<std::vector<int>> succ;  // sorted successor lists, each non-empty
  int initial = 0;
  geom::Region domain;                 // covers every representative

  int size() const { return static_cast<int>(cells.size()); }
  int dim() const { return domain.dim; }
  const geom::Vec &rep(int c) const { return cells[static_cast<std::size_t>(c)]; }
  // Cell whose representative matches x (within tolerance); -1 when none does.
  int cell_of(const geom::Vec &x, double tol = 1e-6) const;
};

// Sorted duplicate-free cell indices.
struct CellSet {
  std::vector<int> cells;

  bool contains(int c) const;
  friend bool operator==(const CellSet &a, const CellSet &b) { return a.cells == b.cells; }
};

CellSet cellset_intersect(const CellSet &a, const CellSet &b);
CellSet cellset_union(const CellSet &a, const CellSet &b);
bool cellset_subset(const CellSet &a, const CellSet &b);

// Grid instantiation of the backend contract documented in continuous.hpp.
struct GridBackend {
  using Set = CellSet;

  const GridSystem *g = nullptr;

  int state_dim() const { return g->dim(); }
  Set domain_set() const;
  const geom::Region &domain_region() const { return g->domain; }

  Set from_region(const geom::Region &r) const;
  Set intersect(const Set &a, const Set &b) const { return cellset_intersect(a, b); }
  Set unite(const Set &a, const Set &b) const { return cellset_union(a, b); }
  bool is_empty(const Set &s) const { return s.cells.empty(); }
  bool is_subset(const Set &a, const Set &b) const { return cellset_subset(a, b); }
  bool set_equal(const Set &a, const Set &b) const { return a == b; }
  bool contains_state(const Set &s, const geom::Vec &x) const;
  Set singleton(const geom::Vec &x) const;

  Set pre(const Set &target) const;   // cells with at least one successor inside
  Set post(const Set &start) const;   // union of successor lists

  Set compress(Set s, std::size_t) const { return s; }
};

}  // namespace stmon::backend
