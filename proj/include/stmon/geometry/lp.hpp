#pragma once

#include <vector>

#include "stmon/geometry/linalg.hpp"

namespace stmon::geom {

// Feasibility tolerance shared by every geometric predicate in the library.
inline constexpr double kFeasEps = 1e-9;

// Closed halfspace {x : normal . x <= offset}.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;  // objective at the maximizer, valid when Optimal
  Vec point;           // maximizer, valid when Optimal
};

// Maximize objective . x over the closed system {x : constraints}, x free in R^dim.
// Deterministic dense simplex, Bland's rule, phase-1 with a single artificial column.
LpResult lp_maximize(const Vec &objective, const std::vector<Halfspace> &constraints, int dim);

// True iff {x : constraints} is non-empty at kFeasEps tolerance; optionally yields a point.
bool lp_feasible(const std::vector<Halfspace> &constraints, int dim, Vec *witness = nullptr);

}  // namespace stmon::geom
