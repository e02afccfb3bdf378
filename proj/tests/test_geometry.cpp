#include <cmath>
#include <random>

#include "doctest.h"
#include "stmon/error.hpp"
#include "stmon/geometry/affine.hpp"
#include "stmon/geometry/polytope.hpp"

using namespace stmon;
using namespace stmon::geom;

namespace {

Region box2(double x0, double x1, double y0, double y1) {
  return Region::box({{x0, x1}, {y0, y1}});
}

// Uniform sample in an axis box.
Vec sample_box(std::mt19937 &rng, const std::vector<std::pair<double, double>> &b) {
  Vec x(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::uniform_real_distribution<double> d(b[i].first, b[i].second);
    x[i] = d(rng);
  }
  return x;
}

// Random union-of-boxes region inside the given bounds.
Region random_region(std::mt19937 &rng, const std::vector<std::pair<double, double>> &world,
                     int max_parts) {
  std::uniform_int_distribution<int> np(1, max_parts);
  int parts = np(rng);
  Region r = Region::empty(static_cast<int>(world.size()));
  for (int k = 0; k < parts; ++k) {
    std::vector<std::pair<double, double>> b(world.size());
    for (std::size_t i = 0; i < world.size(); ++i) {
      std::uniform_real_distribution<double> d(world[i].first, world[i].second);
      double a = d(rng), c = d(rng);
      b[i] = {std::min(a, c), std::max(a, c)};
    }
    r = region_union(r, Region::box(b));
  }
  return r;
}

}  // namespace

TEST_CASE("lp: box maxima and infeasibility") {
  std::vector<Halfspace> box = {
      {{1, 0}, 3}, {{-1, 0}, 0}, {{0, 1}, 2}, {{0, -1}, 1}};  // [0,3] x [-1,2]
  LpResult r = lp_maximize({1, 1}, box, 2);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-9));

  r = lp_maximize({-2, 1}, box, 2);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));

  CHECK(lp_feasible(box, 2));
  std::vector<Halfspace> bad = box;
  bad.push_back({{1, 0}, -1});  // x <= -1 contradicts x >= 0
  CHECK_FALSE(lp_feasible(bad, 2));

  r = lp_maximize({1, 0}, {{{0, 1}, 1}}, 2);  // only y <= 1, x unbounded
  CHECK(r.status == LpStatus::Unbounded);

  r = lp_maximize({0, 0}, {}, 2);  // empty system, zero objective
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(0.0));
}

TEST_CASE("lp: degenerate equality-thin systems") {
  // x = 2 encoded as a pair, y in [0,1].
  std::vector<Halfspace> thin = {
      {{1, 0}, 2}, {{-1, 0}, -2}, {{0, 1}, 1}, {{0, -1}, 0}};
  Vec w;
  REQUIRE(lp_feasible(thin, 2, &w));
  CHECK(w[0] == doctest::Approx(2.0).epsilon(1e-9));
  LpResult r = lp_maximize({1, 1}, thin, 2);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("region: intersect, union, difference basics") {
  Region a = box2(0, 2, 0, 2);
  Region b = box2(1, 3, 1, 3);

  Region inter = region_intersect(a, b);
  CHECK(region_contains_point(inter, {1.5, 1.5}));
  CHECK_FALSE(region_contains_point(inter, {0.5, 0.5}));
  CHECK(region_contains_point(inter, {1.0, 1.0}));  // closed corner
  auto bb = region_bounding_box(inter);
  CHECK(bb[0].first == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(bb[0].second == doctest::Approx(2.0).epsilon(1e-9));

  Region diff = region_difference(a, b);
  CHECK(region_contains_point(diff, {0.5, 0.5}));
  CHECK_FALSE(region_contains_point(diff, {1.5, 1.5}));
  CHECK(region_contains_point(diff, {1.0, 0.5}));   // closure keeps the cut line
  CHECK(region_contains_point(diff, {1.0, 1.0}));   // boundary of b stays in the closure

  Region uni = region_union(box2(0, 1, 0, 1), box2(0.25, 0.75, 0.25, 0.75));
  CHECK(uni.parts.size() == 1);  // nested box absorbed

  CHECK(region_is_empty(region_difference(a, a)));
  CHECK(region_is_empty(Region::box({{1.0, 0.0}})));  // inverted interval
}

TEST_CASE("region: membership tolerance at the boundary") {
  Region h = box2(0, 20, -5, 5);
  CHECK(region_contains_point(h, {20.0 + 1e-12, 0.0}));
  CHECK_FALSE(region_contains_point(h, {20.0 + 1e-6, 0.0}));
}

TEST_CASE("region: subset and equality") {
  Region a = box2(0, 1, 0, 1);
  Region c = box2(0, 2, 0, 2);
  CHECK(region_is_subset(a, c));
  CHECK_FALSE(region_is_subset(c, a));
  // Union cover: [0,2]^2 is covered by two overlapping halves.
  Region left = box2(0, 1.2, 0, 2);
  Region right = box2(1, 2, 0, 2);
  CHECK(region_is_subset(c, region_union(left, right)));
  CHECK(region_equal(c, region_union(left, right)));
  CHECK(region_is_subset(Region::empty(2), a));
  CHECK(region_is_subset(a, a));
}

TEST_CASE("region: singleton points") {
  Region p = Region::point({18.0, 0.0});
  CHECK_FALSE(p.is_empty());
  CHECK(region_contains_point(p, {18.0, 0.0}));
  CHECK_FALSE(region_contains_point(p, {18.0, 0.1}));
  CHECK(region_is_subset(p, box2(0, 100, -5, 5)));
}

TEST_CASE("region: compress merges covered parts and enforces budgets") {
  Region r = Region::empty(1);
  r.parts.push_back(Region::box({{0.0, 1.0}}).parts[0]);
  r.parts.push_back(Region::box({{1.0, 2.0}}).parts[0]);
  r.parts.push_back(Region::box({{0.0, 2.0}}).parts[0]);
  CompressOptions opts;
  opts.exact_threshold = 0;
  Region c = region_compress(r, opts);
  CHECK(c.parts.size() == 1);

  Region scattered = Region::empty(1);
  scattered.parts.push_back(Region::box({{0.0, 1.0}}).parts[0]);
  scattered.parts.push_back(Region::box({{2.0, 3.0}}).parts[0]);
  scattered.parts.push_back(Region::box({{4.0, 5.0}}).parts[0]);
  CompressOptions tight;
  tight.part_budget = 2;
  tight.exact_threshold = 0;
  CHECK_THROWS_AS(region_compress(scattered, tight), BudgetError);
}

TEST_CASE("prune_facets removes implied rows") {
  ConvexPolytope p{2, {{{1, 0}, 3}, {{1, 0}, 5}, {{-1, 0}, 0}, {{0, 1}, 1}, {{0, -1}, 0},
                       {{1, 1}, 10}}};
  ConvexPolytope q = prune_facets(p);
  CHECK(q.facets.size() == 4);  // x<=5 and x+y<=10 both implied
}

TEST_CASE("fm projection: boxes and simplices") {
  ConvexPolytope cube{3, {}};
  for (int i = 0; i < 3; ++i) {
    Vec e(3, 0.0);
    e[i] = 1.0;
    cube.facets.push_back({e, 1.0});
    for (double &v : e) v = -v;
    cube.facets.push_back({e, 0.0});
  }
  auto sq = fm_project_prefix(cube, 2);
  REQUIRE(sq.has_value());
  CHECK(sq->contains({0.5, 0.5}));
  CHECK_FALSE(sq->contains({1.5, 0.5}));

  ConvexPolytope simplex{3, {{{1, 1, 1}, 1}, {{-1, 0, 0}, 0}, {{0, -1, 0}, 0}, {{0, 0, -1}, 0}}};
  auto tri = fm_project_prefix(simplex, 2);
  REQUIRE(tri.has_value());
  CHECK(tri->contains({0.4, 0.4}));
  CHECK_FALSE(tri->contains({0.7, 0.7}));
  CHECK(tri->contains({0.0, 1.0}));

  ConvexPolytope infeas{2, {{{1, 0}, 0}, {{-1, 0}, -1}}};
  CHECK_FALSE(fm_project_prefix(infeas, 1).has_value());
}

namespace {

AffineSystem drone_like() {
  AffineSystem sys;
  sys.A = Mat(2, 2);
  sys.A(0, 0) = 1;
  sys.A(0, 1) = 0.5;
  sys.A(1, 1) = 1;
  sys.B = Mat(2, 1);
  sys.B(0, 0) = 0.5;
  sys.B(1, 0) = 1.0;
  sys.c = {0.0, 0.0};
  sys.domain = box2(0, 100, -5, 5);
  sys.input = Region::box({{-2.5, 2.5}});
  return sys;
}

}  // namespace

TEST_CASE("post_image of a singleton is the input-swept segment") {
  AffineSystem sys = drone_like();
  Region img = post_image(sys, Region::point({18.0, 0.0}));
  // x' = (18 + 0.5u, u) for u in [-2.5, 2.5]
  CHECK(region_contains_point(img, {18.0, 0.0}));
  CHECK(region_contains_point(img, {18.5, 1.0}));
  CHECK(region_contains_point(img, {16.75, -2.5}));
  CHECK_FALSE(region_contains_point(img, {17.0, 1.0}));
  auto bb = region_bounding_box(img);
  CHECK(bb[0].first == doctest::Approx(16.75).epsilon(1e-9));
  CHECK(bb[0].second == doctest::Approx(19.25).epsilon(1e-9));
  CHECK(bb[1].first == doctest::Approx(-2.5).epsilon(1e-9));
  CHECK(bb[1].second == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("pre_image against a box target") {
  AffineSystem sys = drone_like();
  Region target = box2(55, 60, -5, 5);
  Region pre = pre_image(sys, target);
  // From (54, 2): x' = 55 + 0.5u reaches [55,60] with u in [0, 2.5].
  CHECK(region_contains_point(pre, {54.0, 2.0}));
  // From (31, 0): max one-step altitude is 32.25 < 55.
  CHECK_FALSE(region_contains_point(pre, {31.0, 0.0}));
  // Preimage of everything is everything that stays in the domain.
  Region all = pre_image(sys, sys.domain);
  CHECK(region_contains_point(all, {50.0, 0.0}));
}

TEST_CASE("sampling oracle: set algebra agrees with pointwise logic") {
  std::mt19937 rng(20260819);
  const std::vector<std::pair<double, double>> world = {{-2, 2}, {-2, 2}};
  int checked = 0;
  for (int round = 0; round < 25; ++round) {
    Region a = random_region(rng, world, 3);
    Region b = random_region(rng, world, 3);
    Region inter = region_intersect(a, b);
    Region uni = region_union(a, b);
    Region diff = region_difference(a, b);
    bool subset = region_is_subset(a, b);
    for (int s = 0; s < 400; ++s) {
      Vec x = sample_box(rng, world);
      bool ina = region_contains_point(a, x);
      bool inb = region_contains_point(b, x);
      CHECK(region_contains_point(inter, x) == (ina && inb));
      CHECK(region_contains_point(uni, x) == (ina || inb));
      // Difference with closure slack: strictly inside b means outside the
      // difference; clearly outside b and inside a means inside it.
      bool deep_in_b = region_contains_point(b, x, -1e-7);
      bool clear_of_b = !region_contains_point(b, x, 1e-7);
      if (ina && clear_of_b) CHECK(region_contains_point(diff, x));
      if (deep_in_b) CHECK_FALSE(region_contains_point(diff, x, -1e-7));
      if (region_contains_point(diff, x, -1e-7)) CHECK(ina);
      if (subset && ina) CHECK(region_contains_point(b, x, 1e-7));
      ++checked;
    }
  }
  CHECK(checked == 10000);
}

TEST_CASE("sampling oracle: pre/post adjunction on random systems") {
  std::mt19937 rng(77001);
  std::uniform_real_distribution<double> coef(-1.2, 1.2);
  int boundary_skips = 0;
  for (int k = 0; k < 100; ++k) {
    AffineSystem sys;
    sys.A = Mat(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) sys.A(i, j) = coef(rng);
    sys.B = Mat(2, 1);
    sys.B(0, 0) = coef(rng);
    sys.B(1, 0) = coef(rng);
    sys.c = {0.25 * coef(rng), 0.25 * coef(rng)};
    sys.domain = box2(-3, 3, -3, 3);
    sys.input = Region::box({{-1.0, 1.0}});
    Region target = random_region(rng, {{-3, 3}, {-3, 3}}, 2);
    Region pre = pre_image(sys, target);

    for (int s = 0; s < 20; ++s) {
      Vec x = sample_box(rng, {{-3, 3}, {-3, 3}});
      bool lhs = region_contains_point(pre, x);
      Region step = post_image(sys, Region::point(x));
      bool rhs = !region_is_empty(region_intersect(step, target));
      if (lhs != rhs) {
        // Tolerate decision-boundary samples only.
        bool near = region_contains_point(pre, x, 1e-6) != region_contains_point(pre, x, -1e-6);
        if (near) { ++boundary_skips; continue; }
        CAPTURE(k); CAPTURE(s); CAPTURE(x[0]); CAPTURE(x[1]);
        CHECK(lhs == rhs);
      }
    }
  }
  CHECK(boundary_skips < 20);
}

TEST_CASE("bounding box reports unbounded directions") {
  Region half{1, {ConvexPolytope{1, {{{-1.0}, 0.0}}}}};  // x >= 0
  auto bb = region_bounding_box(half);
  CHECK(bb[0].first == doctest::Approx(0.0));
  CHECK(std::isinf(bb[0].second));
}
