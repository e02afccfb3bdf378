#pragma once

#include <string>
#include <vector>

#include "stmon/geometry/affine.hpp"
#include "stmon/stl/parser.hpp"

namespace stmon::harness {

// A ready-to-monitor case study: dynamics, named regions, formula (text and
// parsed form) and the silence bound.
struct Model {
  std::string name;
  geom::AffineSystem sys;
  stl::SymbolTable symbols;
  std::string formula;
  stl::StlSpec spec;
  int t_max = 5;
};

// Double-integrator altitude model: state (z, v), half-second-style step
//   z+ = z + 0.5 v + 0.5 u,  v+ = v + u,  u in [-2.5, 2.5],
// domain [0,100] x [-5,5], with the take-off clearance task over 50 steps.
Model build_drone_model();

struct SpacecraftOptions {
  // Position box standing in for the debris ball; chosen so the open-loop
  // prediction tube of the shipped reference pass grazes it (configuration,
  // not a quantity taken from anywhere).
  double debris_x_lo = -45.0;
  double debris_x_hi = -35.0;
  double debris_y_lo = 2.5;
  double debris_y_hi = 8.0;
  int t_max = 5;
};

// Planar rendezvous model: relative position/velocity (x, y, vx, vy) in meters
// and meters per minute, linearized about a geostationary target orbit and
// discretized exactly at 0.5-minute steps. Thrust bounds are in newtons for a
// 500 kg chaser; the input matrix carries the unit bridge. The task: reach the
// goal box once, never touch the debris box, stay in the line-of-sight cone.
Model build_spacecraft_model(const SpacecraftOptions &opts = {});

// Exact iteration of x+ = A x + B u + c from x0. Throws when an input leaves
// the input set or a visited state leaves the domain; never clips silently.
stl::Trace simulate_plant(const geom::AffineSystem &sys, const geom::Vec &x0,
                          const std::vector<geom::Vec> &inputs);

// Shipped behaviors for the case studies (deterministic, fixture-grade).
geom::Vec drone_initial_state();
std::vector<geom::Vec> drone_reference_inputs();  // satisfies the task
std::vector<geom::Vec> drone_hover_inputs();      // stays on the pad, violating
geom::Vec spacecraft_initial_state();
std::vector<geom::Vec> spacecraft_reference_inputs(const Model &m);

}  // namespace stmon::harness
