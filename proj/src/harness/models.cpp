#include "stmon/harness/models.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "stmon/error.hpp"
#include "stmon/geometry/polytope.hpp"

namespace stmon::harness {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Exact zero-order-hold discretization of xdot = Ac x + Bc u over one step:
// Ad = exp(Ac dt), Bd = (integral of exp(Ac s) ds over [0, dt]) Bc, both by
// power series. The series converges fast here because |Ac| dt is tiny.
std::pair<geom::Mat, geom::Mat> discretize(const geom::Mat &ac, const geom::Mat &bc, double dt) {
  const int n = ac.rows;
  geom::Mat ad = geom::Mat::identity(n);
  geom::Mat integral = geom::scale(geom::Mat::identity(n), dt);
  geom::Mat term = geom::Mat::identity(n);
  for (int k = 1; k <= 40; ++k) {
    term = geom::scale(term * ac, dt / k);
    ad = ad + term;
    integral = integral + geom::scale(term, dt / (k + 1));
    double mag = 0.0;
    for (double v : term.a) mag = std::max(mag, std::fabs(v));
    if (mag < 1e-300) break;
  }
  return {ad, integral * bc};
}

geom::Vec step(const geom::AffineSystem &sys, const geom::Vec &x, const geom::Vec &u) {
  geom::Vec next = sys.A * x;
  geom::Vec push = sys.B * u;
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += push[i] + sys.c[i];
  return next;
}

// Piecewise-linear interpolation through (time, value) knots; constant beyond
// the last knot.
double profile(const std::vector<std::pair<double, double>> &knots, double t) {
  if (t <= knots.front().first) return knots.front().second;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (t <= knots[i].first) {
      double w = (t - knots[i - 1].first) / (knots[i].first - knots[i - 1].first);
      return knots[i - 1].second + w * (knots[i].second - knots[i - 1].second);
    }
  }
  return knots.back().second;
}

}  // namespace

Model build_drone_model() {
  Model m;
  m.name = "drone";
  m.sys.A = geom::Mat{2, 2, {1.0, 0.5, 0.0, 1.0}};
  m.sys.B = geom::Mat{2, 1, {0.5, 1.0}};
  m.sys.c = geom::Vec{0.0, 0.0};
  m.sys.domain = geom::Region::box({{0.0, 100.0}, {-5.0, 5.0}});
  m.sys.input = geom::Region::box({{-2.5, 2.5}});
  m.symbols = stl::default_symbols(2);
  m.formula =
      "F[0,20] z in [0,20] && F[0,20] z in [15,30] && "
      "(z in [30,60]) U[40,50] (z in [55,60])";
  m.spec = stl::parse_spec(m.formula, 2, m.symbols);
  m.t_max = 5;
  return m;
}

Model build_spacecraft_model(const SpacecraftOptions &opts) {
  Model m;
  m.name = "spacecraft";

  // Relative-motion linearization about a circular geostationary orbit, in
  // meters and minutes. mu is the Earth gravitational parameter converted to
  // per-minute-squared units; r is the orbit radius; n the mean motion.
  const double mu = 3.698e14 * 60.0 * 60.0;
  const double r = 42164.0e3;
  const double n = std::sqrt(mu / (r * r * r));
  const double mass = 500.0;
  // Thrust enters in newtons; acceleration in m/min^2 is (u / mass) * 3600.
  const double accel = 3600.0 / mass;
  const double dt = 0.5;

  geom::Mat ac{4, 4,
               {0.0, 0.0, 1.0, 0.0,
                0.0, 0.0, 0.0, 1.0,
                3.0 * n * n, 0.0, 0.0, 2.0 * n,
                0.0, 0.0, -2.0 * n, 0.0}};
  geom::Mat bc{4, 2,
               {0.0, 0.0,
                0.0, 0.0,
                accel, 0.0,
                0.0, accel}};
  auto [ad, bd] = discretize(ac, bc, dt);
  m.sys.A = std::move(ad);
  m.sys.B = std::move(bd);
  m.sys.c = geom::Vec{0.0, 0.0, 0.0, 0.0};
  m.sys.domain = geom::Region::box({{-100.0, 0.0}, {-70.0, 70.0}, {0.0, 10.0}, {0.0, 10.0}});
  m.sys.input = geom::Region::box({{-3.0, 3.0}, {-3.0, 3.0}});

  m.symbols = stl::default_symbols(4);
  m.symbols.regions["Goal"] =
      geom::Region::box({{-6.0, 0.0}, {-2.0, 2.0}, {0.0, 3.0}, {0.0, 3.0}});
  geom::Region debris = geom::Region::box(
      {{opts.debris_x_lo, opts.debris_x_hi}, {opts.debris_y_lo, opts.debris_y_hi}, {0.0, 10.0}, {0.0, 10.0}});
  m.symbols.regions["Debris"] = debris;
  m.symbols.regions["NoDebris"] = geom::region_difference(m.sys.domain, debris);
  // Line-of-sight cone about the negative x axis with half-angle 30 degrees:
  // y <= -x tan30 and y >= x tan30.
  const double t30 = std::tan(M_PI / 6.0);
  geom::ConvexPolytope cone;
  cone.dim = 4;
  cone.facets.push_back(geom::Halfspace{{t30, 1.0, 0.0, 0.0}, 0.0});
  cone.facets.push_back(geom::Halfspace{{t30, -1.0, 0.0, 0.0}, 0.0});
  m.symbols.regions["LOS"] = geom::Region::from_parts(4, {cone});

  m.formula = "F[0,50] Goal && G[0,50] NoDebris && G[0,50] LOS";
  m.spec = stl::parse_spec(m.formula, 4, m.symbols);
  m.t_max = opts.t_max;
  return m;
}

stl::Trace simulate_plant(const geom::AffineSystem &sys, const geom::Vec &x0,
                          const std::vector<geom::Vec> &inputs) {
  if (static_cast<int>(x0.size()) != sys.state_dim()) throw Error("initial state has wrong dimension");
  stl::Trace tr;
  tr.start = 0;
  tr.states.push_back(x0);
  if (!geom::region_contains_point(sys.domain, x0))
    throw Error("initial state is outside the domain");
  geom::Vec x = x0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (static_cast<int>(inputs[k].size()) != sys.input_dim()) throw Error("input has wrong dimension");
    if (!geom::region_contains_point(sys.input, inputs[k]))
      throw Error("input " + std::to_string(k) + " is outside the input set");
    x = step(sys, x, inputs[k]);
    if (!geom::region_contains_point(sys.domain, x))
      throw Error("state left the domain at step " + std::to_string(k + 1));
    tr.states.push_back(x);
  }
  return tr;
}

geom::Vec drone_initial_state() { return {0.0, 0.0}; }

std::vector<geom::Vec> drone_reference_inputs() {
  // Climb to 17, hold, climb to 57, park: clears both early checkpoints well
  // before step 20 and sits inside the final corridor from step 40 on.
  const std::vector<std::pair<double, double>> zref = {
      {0.0, 0.0}, {10.0, 17.0}, {12.0, 17.0}, {32.0, 57.0}, {50.0, 57.0}};
  geom::AffineSystem sys = build_drone_model().sys;
  geom::Vec x = drone_initial_state();
  std::vector<geom::Vec> inputs;
  for (int t = 0; t < 50; ++t) {
    double u = 2.0 * (profile(zref, t + 1.0) - x[0]) - x[1];
    u = clamp(u, -2.5, 2.5);
    u = clamp(u, -5.0 - x[1], 5.0 - x[1]);
    inputs.push_back({u});
    x = step(sys, x, inputs.back());
  }
  return inputs;
}

std::vector<geom::Vec> drone_hover_inputs() { return std::vector<geom::Vec>(50, geom::Vec{0.0}); }

geom::Vec spacecraft_initial_state() { return {-95.0, -30.0, 2.0, 1.0}; }

std::vector<geom::Vec> spacecraft_reference_inputs(const Model &m) {
  // Approach along the lower half of the cone: the goal box caps how high the
  // chaser may sit while the rendezvous is still owed, and the cone floor
  // rises as it closes in, so the pass threads between the two and climbs
  // late. It ducks under the debris box and settles at the goal with the
  // small velocities the goal box demands.
  const std::vector<std::pair<double, double>> xref = {
      {0.0, -95.0},  {16.0, -67.0}, {30.0, -45.0}, {38.0, -28.0},
      {44.0, -7.0},  {46.0, -5.3},  {50.0, -4.6}};
  const std::vector<std::pair<double, double>> yref = {
      {0.0, -30.0},  {16.0, -19.0}, {30.0, -10.0}, {38.0, -9.0},
      {44.0, -2.6},  {46.0, -1.75}, {50.0, -1.4}};
  geom::Vec x = spacecraft_initial_state();
  std::vector<geom::Vec> inputs;
  for (int t = 0; t < 50; ++t) {
    // Place the next velocities exactly (the domain admits no negative ones,
    // so a small positive floor keeps drift from the orbital coupling at bay):
    // solve the velocity block of B for the thrust doing it, then clamp.
    double vx_des = clamp(2.0 * (profile(xref, t + 1.0) - x[0]), 0.05, 9.5);
    double vy_des = clamp(2.0 * (profile(yref, t + 1.0) - x[1]), 0.05, 9.5);
    geom::Vec drift = m.sys.A * x;
    double rx = vx_des - drift[2];
    double ry = vy_des - drift[3];
    double det = m.sys.B(2, 0) * m.sys.B(3, 1) - m.sys.B(2, 1) * m.sys.B(3, 0);
    double ux = clamp((rx * m.sys.B(3, 1) - ry * m.sys.B(2, 1)) / det, -3.0, 3.0);
    double uy = clamp((m.sys.B(2, 0) * ry - m.sys.B(3, 0) * rx) / det, -3.0, 3.0);
    inputs.push_back({ux, uy});
    x = step(m.sys, x, inputs.back());
  }
  return inputs;
}

}  // namespace stmon::harness
