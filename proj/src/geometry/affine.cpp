// One-step images of affine systems via projection, never via matrix inversion:
// post lifts to (x', x, u) space and eliminates (x, u); pre substitutes the update
// into the target's facets and eliminates u. Elimination is Fourier-Motzkin with a
// pruning pass after every variable so intermediate systems stay small.

#include "stmon/geometry/affine.hpp"

#include <algorithm>
#include <cmath>

#include "stmon/error.hpp"

namespace stmon::geom {

namespace {

constexpr std::size_t kFacetCap = 2048;

struct Row {
  Vec a;
  double b;
};

void normalize_row(Row &r) {
  double mx = 0.0;
  for (double v : r.a) mx = std::max(mx, std::fabs(v));
  if (mx == 0.0) return;
  for (double &v : r.a) {
    v /= mx;
    if (std::fabs(v) < 1e-12) v = 0.0;
  }
  r.b /= mx;
}

// Drops duplicate/looser rows and trivial rows; false means a contradictory
// constant row was found (the system is empty).
bool quick_clean(std::vector<Row> &rows) {
  std::vector<Row> out;
  for (Row &r : rows) {
    normalize_row(r);
    bool zero = true;
    for (double v : r.a)
      if (v != 0.0) { zero = false; break; }
    if (zero) {
      if (r.b < -kFeasEps) return false;
      continue;
    }
    bool merged = false;
    for (Row &k : out) {
      bool same = true;
      for (std::size_t j = 0; j < r.a.size(); ++j)
        if (std::fabs(k.a[j] - r.a[j]) > 1e-12) { same = false; break; }
      if (same) {
        k.b = std::min(k.b, r.b);
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(std::move(r));
  }
  rows = std::move(out);
  return true;
}

// LP-exact redundancy pruning over the active variable span [0, width).
void lp_prune(std::vector<Row> &rows, int width) {
  std::size_t i = 0;
  while (i < rows.size() && rows.size() > 1) {
    std::vector<Halfspace> rest;
    rest.reserve(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (j == i) continue;
      rest.push_back({Vec(rows[j].a.begin(), rows[j].a.begin() + width), rows[j].b});
    }
    Vec obj(rows[i].a.begin(), rows[i].a.begin() + width);
    rest.push_back({obj, rows[i].b + 1.0});  // bound the test LP
    LpResult r = lp_maximize(obj, rest, width);
    if (r.status == LpStatus::Optimal && r.value <= rows[i].b + kFeasEps) {
      rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
}

}  // namespace

std::optional<ConvexPolytope> fm_project_prefix(const ConvexPolytope &p, int keep) {
  const int dim = p.dim;
  std::vector<Row> rows;
  rows.reserve(p.facets.size());
  for (const Halfspace &h : p.facets) rows.push_back({h.normal, h.offset});
  if (!quick_clean(rows)) return std::nullopt;

  std::vector<int> pending;
  for (int j = keep; j < dim; ++j) pending.push_back(j);

  while (!pending.empty()) {
    // Pick the variable with the fewest pos*neg combinations.
    std::size_t best_idx = 0;
    long best_score = -1;
    for (std::size_t k = 0; k < pending.size(); ++k) {
      long pos = 0, neg = 0;
      for (const Row &r : rows) {
        if (r.a[pending[k]] > 0.0) ++pos;
        else if (r.a[pending[k]] < 0.0) ++neg;
      }
      long score = pos * neg - (pos + neg);
      if (best_score < 0 || score < best_score) {
        best_score = score;
        best_idx = k;
      }
    }
    const int var = pending[best_idx];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best_idx));

    std::vector<Row> pos, neg, next;
    for (Row &r : rows) {
      if (r.a[var] > 0.0) pos.push_back(std::move(r));
      else if (r.a[var] < 0.0) neg.push_back(std::move(r));
      else next.push_back(std::move(r));
    }
    for (const Row &rp : pos)
      for (const Row &rn : neg) {
        Row comb;
        comb.a.resize(static_cast<std::size_t>(dim));
        const double wp = -rn.a[var];  // > 0
        const double wn = rp.a[var];   // > 0
        double mass = 0.0, mx = 0.0;
        for (int j = 0; j < dim; ++j) {
          comb.a[j] = wp * rp.a[j] + wn * rn.a[j];
          if (j == var) continue;
          mass = std::max(mass, std::fabs(wp * rp.a[j]) + std::fabs(wn * rn.a[j]));
          mx = std::max(mx, std::fabs(comb.a[j]));
        }
        comb.a[var] = 0.0;
        comb.b = wp * rp.b + wn * rn.b;
        // A combination whose coefficients vanish against the magnitudes that
        // went in is the zero row up to roundoff; normalizing it would blow the
        // residue up into a spurious constraint. Keep only its verdict: a
        // clearly negative constant marks the system empty, anything else says
        // nothing at all.
        if (mx <= 1e-10 * mass) {
          double bmass = std::fabs(wp * rp.b) + std::fabs(wn * rn.b);
          if (comb.b < -1e-10 * bmass - kFeasEps) return std::nullopt;
          continue;
        }
        next.push_back(std::move(comb));
      }
    if (!quick_clean(next)) return std::nullopt;
    lp_prune(next, dim);
    if (next.size() > kFacetCap)
      throw BudgetError("projection exceeded the facet cap");
    rows = std::move(next);
  }

  ConvexPolytope out{keep, {}};
  for (Row &r : rows) {
    Vec a(r.a.begin(), r.a.begin() + keep);
    out.facets.push_back({std::move(a), r.b});
  }
  if (!lp_feasible(out.facets, keep)) return std::nullopt;
  return out;
}

Region post_image(const AffineSystem &sys, const Region &r) {
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  const int lifted = 2 * n + m;  // columns: x' (kept), x, u

  std::vector<ConvexPolytope> parts;
  for (const ConvexPolytope &part : r.parts) {
    for (const ConvexPolytope &w : sys.input.parts) {
      ConvexPolytope lift{lifted, {}};
      for (const Halfspace &h : part.facets) {
        Vec a(lifted, 0.0);
        for (int j = 0; j < n; ++j) a[n + j] = h.normal[j];
        lift.facets.push_back({std::move(a), h.offset});
      }
      for (const Halfspace &h : w.facets) {
        Vec a(lifted, 0.0);
        for (int j = 0; j < m; ++j) a[2 * n + j] = h.normal[j];
        lift.facets.push_back({std::move(a), h.offset});
      }
      // x' - A x - B u = c as a pair of inequalities per row.
      for (int i = 0; i < n; ++i) {
        Vec a(lifted, 0.0);
        a[i] = 1.0;
        for (int j = 0; j < n; ++j) a[n + j] = -sys.A(i, j);
        for (int j = 0; j < m; ++j) a[2 * n + j] = -sys.B(i, j);
        Vec an = a;
        for (double &v : an) v = -v;
        lift.facets.push_back({std::move(a), sys.c[i]});
        lift.facets.push_back({std::move(an), -sys.c[i]});
      }
      std::optional<ConvexPolytope> proj = fm_project_prefix(lift, n);
      if (proj) parts.push_back(std::move(*proj));
    }
  }
  Region img = Region::from_parts(n, std::move(parts));
  return region_intersect(img, sys.domain);
}

Region pre_image(const AffineSystem &sys, const Region &target) {
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  const int lifted = n + m;  // columns: x (kept), u

  std::vector<ConvexPolytope> parts;
  for (const ConvexPolytope &tp : target.parts) {
    for (const ConvexPolytope &w : sys.input.parts) {
      ConvexPolytope lift{lifted, {}};
      for (const Halfspace &h : tp.facets) {
        Vec a(lifted, 0.0);
        double rhs = h.offset;
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) s += h.normal[i] * sys.A(i, j);
          a[j] = s;
        }
        for (int j = 0; j < m; ++j) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) s += h.normal[i] * sys.B(i, j);
          a[n + j] = s;
        }
        for (int i = 0; i < n; ++i) rhs -= h.normal[i] * sys.c[i];
        lift.facets.push_back({std::move(a), rhs});
      }
      for (const Halfspace &h : w.facets) {
        Vec a(lifted, 0.0);
        for (int j = 0; j < m; ++j) a[n + j] = h.normal[j];
        lift.facets.push_back({std::move(a), h.offset});
      }
      std::optional<ConvexPolytope> proj = fm_project_prefix(lift, n);
      if (proj) parts.push_back(std::move(*proj));
    }
  }
  Region pre = Region::from_parts(n, std::move(parts));
  return region_intersect(pre, sys.domain);
}

}  // namespace stmon::geom
