// Dense two-phase simplex over floating point with Bland's rule.
//
// Free variables are split x = p - q with p, q >= 0; every inequality row gets a
// slack, and phase 1 drives a single artificial column out of the basis. All tie
// breaking is by lowest column / lowest basic-variable index, so results are
// deterministic for a given constraint order.

#include "stmon/geometry/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stmon/error.hpp"

namespace stmon::geom {

namespace {

constexpr double kPivotEps = 1e-9;
constexpr int kMaxPivots = 200000;

struct Tableau {
  int m = 0;       // rows
  int ncols = 0;   // structural + slack (+ artificial) columns
  std::vector<std::vector<double>> row;  // m x (ncols + 1), last entry = rhs
  std::vector<double> cost;              // ncols reduced costs (maximization)
  std::vector<int> basis;                // basic column per row
  std::vector<char> enterable;           // columns allowed to enter

  void pivot(int r, int c) {
    std::vector<double> &pr = row[r];
    const double piv = pr[c];
    for (double &v : pr) v /= piv;
    pr[c] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      double f = row[i][c];
      if (f == 0.0) continue;
      std::vector<double> &ri = row[i];
      for (int j = 0; j <= ncols; ++j) ri[j] -= f * pr[j];
      ri[c] = 0.0;
    }
    double f = cost[c];
    if (f != 0.0) {
      for (int j = 0; j < ncols; ++j) cost[j] -= f * pr[j];
      cost[c] = 0.0;
    }
    basis[r] = c;
  }

  // Bland's rule maximization step. Returns false when no improving column exists.
  // Throws on unboundedness only if `allow_unbounded` is cleared by the caller loop.
  enum class Step { Done, Moved, Unbounded };

  Step step() {
    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      if (enterable[j] && cost[j] > kFeasEps) { enter = j; break; }
    }
    if (enter < 0) return Step::Done;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      double a = row[i][enter];
      if (a > kPivotEps) {
        double ratio = row[i][ncols] / a;
        if (ratio < best - kPivotEps || (ratio < best + kPivotEps &&
            (leave < 0 || basis[i] < basis[leave]))) {
          if (ratio < best) best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return Step::Unbounded;
    pivot(leave, enter);
    return Step::Moved;
  }

  Step run() {
    for (int it = 0; it < kMaxPivots; ++it) {
      Step s = step();
      if (s != Step::Moved) return s;
    }
    throw Error("simplex failed to terminate");
  }
};

// Builds the phase-1 tableau; returns false when the system is trivially infeasible
// through a contradictory all-zero row.
bool build(const std::vector<Halfspace> &constraints, int dim, Tableau &tab, bool *infeasible) {
  *infeasible = false;
  std::vector<std::vector<double>> rows;
  rows.reserve(constraints.size());
  for (const Halfspace &h : constraints) {
    double mx = 0.0;
    for (double v : h.normal) mx = std::max(mx, std::fabs(v));
    if (mx == 0.0) {
      if (h.offset < -kFeasEps) { *infeasible = true; return false; }
      continue;  // trivially true row
    }
    std::vector<double> r(static_cast<std::size_t>(dim) + 1);
    for (int j = 0; j < dim; ++j) r[j] = h.normal[j] / mx;
    r[dim] = h.offset / mx;
    rows.push_back(std::move(r));
  }

  const int m = static_cast<int>(rows.size());
  const int ncols = 2 * dim + m + 1;  // p, q, slacks, artificial
  tab.m = m;
  tab.ncols = ncols;
  tab.row.assign(m, std::vector<double>(ncols + 1, 0.0));
  tab.cost.assign(ncols, 0.0);
  tab.basis.resize(m);
  tab.enterable.assign(ncols, 1);

  for (int i = 0; i < m; ++i) {
    std::vector<double> &r = tab.row[i];
    for (int j = 0; j < dim; ++j) {
      r[j] = rows[i][j];
      r[dim + j] = -rows[i][j];
    }
    r[2 * dim + i] = 1.0;        // slack
    r[ncols - 1] = -1.0;         // artificial
    r[ncols] = rows[i][dim];     // rhs
    tab.basis[i] = 2 * dim + i;
  }
  return true;
}

// Phase 1: returns true when the system is feasible within kFeasEps.
bool phase1(Tableau &tab) {
  if (tab.m == 0) return true;
  int worst = 0;
  for (int i = 1; i < tab.m; ++i)
    if (tab.row[i][tab.ncols] < tab.row[worst][tab.ncols]) worst = i;
  if (tab.row[worst][tab.ncols] >= -kFeasEps) return true;  // slack basis already feasible

  const int art = tab.ncols - 1;
  tab.cost.assign(tab.ncols, 0.0);
  tab.cost[art] = -1.0;  // maximize -x0
  tab.pivot(worst, art);
  Tableau::Step s = tab.run();
  if (s == Tableau::Step::Unbounded) throw Error("phase-1 simplex unbounded");

  // Optimal x0 = rhs of its row if basic, else 0.
  double x0 = 0.0;
  for (int i = 0; i < tab.m; ++i)
    if (tab.basis[i] == art) x0 = tab.row[i][tab.ncols];
  if (x0 > kFeasEps) return false;

  // Drive a degenerate artificial out of the basis so phase 2 never moves it.
  for (int i = 0; i < tab.m; ++i) {
    if (tab.basis[i] != art) continue;
    int col = -1;
    for (int j = 0; j < tab.ncols - 1; ++j)
      if (std::fabs(tab.row[i][j]) > kPivotEps) { col = j; break; }
    if (col >= 0) tab.pivot(i, col);
    break;
  }
  tab.enterable[art] = 0;
  return true;
}

Vec extract_point(const Tableau &tab, int dim) {
  Vec x(dim, 0.0);
  for (int i = 0; i < tab.m; ++i) {
    int b = tab.basis[i];
    double v = tab.row[i][tab.ncols];
    if (b < dim) x[b] += v;
    else if (b < 2 * dim) x[b - dim] -= v;
  }
  return x;
}

}  // namespace

bool lp_feasible(const std::vector<Halfspace> &constraints, int dim, Vec *witness) {
  Tableau tab;
  bool trivially_infeasible = false;
  if (!build(constraints, dim, tab, &trivially_infeasible)) {
    if (trivially_infeasible) return false;
  }
  if (!phase1(tab)) return false;
  if (witness) *witness = extract_point(tab, dim);
  return true;
}

LpResult lp_maximize(const Vec &objective, const std::vector<Halfspace> &constraints, int dim) {
  LpResult res;
  Tableau tab;
  bool trivially_infeasible = false;
  if (!build(constraints, dim, tab, &trivially_infeasible)) {
    if (trivially_infeasible) return res;
  }
  if (!phase1(tab)) return res;

  // Install the phase-2 objective and price out the current basis.
  tab.cost.assign(tab.ncols, 0.0);
  for (int j = 0; j < dim; ++j) {
    tab.cost[j] = objective[j];
    tab.cost[dim + j] = -objective[j];
  }
  if (tab.ncols > 0) tab.enterable[tab.ncols - 1] = 0;
  for (int i = 0; i < tab.m; ++i) {
    int b = tab.basis[i];
    double f = tab.cost[b];
    if (f == 0.0) continue;
    for (int j = 0; j < tab.ncols; ++j) tab.cost[j] -= f * tab.row[i][j];
    tab.cost[b] = 0.0;
  }

  Tableau::Step s = tab.run();
  if (s == Tableau::Step::Unbounded) {
    res.status = LpStatus::Unbounded;
    return res;
  }
  res.status = LpStatus::Optimal;
  res.point = extract_point(tab, dim);
  res.value = dot(objective, res.point);
  return res;
}

}  // namespace stmon::geom
