#include "stmon/backend/grid.hpp"

#include <algorithm>
#include <cmath>

#include "stmon/error.hpp"

namespace stmon::backend {

int GridSystem::cell_of(const geom::Vec &x, double tol) const {
  for (int c = 0; c < size(); ++c) {
    const geom::Vec &r = rep(c);
    if (r.size() != x.size()) continue;
    double d = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) d = std::max(d, std::fabs(r[j] - x[j]));
    if (d <= tol) return c;
  }
  return -1;
}

bool CellSet::contains(int c) const {
  return std::binary_search(cells.begin(), cells.end(), c);
}

CellSet cellset_intersect(const CellSet &a, const CellSet &b) {
  CellSet r;
  std::set_intersection(a.cells.begin(), a.cells.end(), b.cells.begin(), b.cells.end(),
                        std::back_inserter(r.cells));
  return r;
}

CellSet cellset_union(const CellSet &a, const CellSet &b) {
  CellSet r;
  std::set_union(a.cells.begin(), a.cells.end(), b.cells.begin(), b.cells.end(),
                 std::back_inserter(r.cells));
  return r;
}

bool cellset_subset(const CellSet &a, const CellSet &b) {
  return std::includes(b.cells.begin(), b.cells.end(), a.cells.begin(), a.cells.end());
}

GridBackend::Set GridBackend::domain_set() const {
  CellSet s;
  s.cells.resize(static_cast<std::size_t>(g->size()));
  for (int c = 0; c < g->size(); ++c) s.cells[static_cast<std::size_t>(c)] = c;
  return s;
}

GridBackend::Set GridBackend::from_region(const geom::Region &r) const {
  CellSet s;
  for (int c = 0; c < g->size(); ++c)
    if (geom::region_contains_point(r, g->rep(c))) s.cells.push_back(c);
  return s;
}

bool GridBackend::contains_state(const Set &s, const geom::Vec &x) const {
  int c = g->cell_of(x);
  return c >= 0 && s.contains(c);
}

GridBackend::Set GridBackend::singleton(const geom::Vec &x) const {
  int c = g->cell_of(x);
  if (c < 0) throw Error("state does not match any grid cell");
  return CellSet{{c}};
}

GridBackend::Set GridBackend::pre(const Set &target) const {
  CellSet s;
  for (int c = 0; c < g->size(); ++c) {
    for (int d : g->succ[static_cast<std::size_t>(c)]) {
      if (target.contains(d)) {
        s.cells.push_back(c);
        break;
      }
    }
  }
  return s;
}

GridBackend::Set GridBackend::post(const Set &start) const {
  CellSet s;
  for (int c : start.cells)
    for (int d : g->succ[static_cast<std::size_t>(c)]) s.cells.push_back(d);
  std::sort(s.cells.begin(), s.cells.end());
  s.cells.erase(std::unique(s.cells.begin(), s.cells.end()), s.cells.end());
  return s;
}

}  // namespace stmon::backend
