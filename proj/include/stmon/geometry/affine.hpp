#pragma once

#include <optional>

#include "stmon/geometry/polytope.hpp"

namespace stmon::geom {

// Discrete-time affine control system x' = A x + B u + c with box-like state and
// input sets. `domain` lives in R^n, `input` in R^m (a union region is allowed and
// is handled part-wise).
struct AffineSystem {
  Mat A;
  Mat B;
  Vec c;
  Region domain;
  Region input;

  int state_dim() const { return A.rows; }
  int input_dim() const { return B.cols; }
};

// Projects the polytope onto its first `keep` coordinates by Fourier-Motzkin
// elimination with redundancy pruning after every eliminated variable.
// Returns nullopt when the input system is infeasible (detected on the fly).
std::optional<ConvexPolytope> fm_project_prefix(const ConvexPolytope &p, int keep);

// Exact one-step image {A x + B u + c : x in r, u in input} intersected with domain.
Region post_image(const AffineSystem &sys, const Region &r);

// Exact one-step controllable preimage {x in domain : exists u in input with
// A x + B u + c in target}.
Region pre_image(const AffineSystem &sys, const Region &target);

}  // namespace stmon::geom
