#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "flagcert/errors.hpp"
#include "flagcert/projgeom.hpp"
#include "flagcert/sampling.hpp"

using namespace flagcert;

namespace {

ProjPoint random_point(std::mt19937_64& rng, std::size_t d) {
  Vec v(d);
  for (double& x : v) x = standard_normal(rng);
  return ProjPoint(v);
}

ProjHyperplane random_hyperplane(std::mt19937_64& rng, std::size_t d) {
  Vec v(d);
  for (double& x : v) x = standard_normal(rng);
  return ProjHyperplane(v);
}

double point_distance(const ProjPoint& a, const ProjPoint& b) { return fubini_study(a, b); }

// Point of h: project a random vector onto the kernel of the covector.
ProjPoint point_on(std::mt19937_64& rng, const ProjHyperplane& h) {
  Vec v(h.dim());
  for (double& x : v) x = standard_normal(rng);
  const Vec& n = h.covector();
  return ProjPoint(axpy(-dot(v, n) / dot(n, n), n, v));
}

}  // namespace

TEST_CASE("projective points are sign-canonical") {
  CHECK(ProjPoint{2, -4} == ProjPoint{-1, 2});
  CHECK_THROWS_AS((ProjPoint{0, 0}), Error);
}

TEST_CASE("act examples") {
  std::mt19937_64 rng(1);
  const ProjPoint p = random_point(rng, 3);
  CHECK(point_distance(act(Matrix::identity(3), p), p) < 1e-15);
  CHECK(point_distance(act(Matrix::diagonal(Vec{2, 1}), ProjPoint{1, 1}), ProjPoint{2, 1}) < 1e-15);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix g = fixtures::random_invertible(rng, 4);
    const ProjPoint q = random_point(rng, 4);
    CHECK(point_distance(act(inverse(g), act(g, q)), q) < 1e-10);
  }
}

TEST_CASE("act is a group action") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 2 + trial % 4;
    const Matrix g = fixtures::random_invertible(rng, d), h = fixtures::random_invertible(rng, d);
    const ProjPoint p = random_point(rng, d);
    CHECK(point_distance(act(g * h, p), act(g, act(h, p))) < 1e-10);
  }
}

TEST_CASE("act_dual preserves incidence") {
  std::mt19937_64 rng(3);
  const ProjHyperplane h{0, 0, 1};
  CHECK(act_dual(Matrix::identity(3), h) == h);
  CHECK(act_dual(Matrix::diagonal(Vec{2, 1, 1}), h) == h);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 4;
    const Matrix g = fixtures::random_invertible(rng, d);
    const ProjHyperplane k = random_hyperplane(rng, d);
    const ProjPoint p = point_on(rng, k);
    CHECK(std::abs(act_dual(g, k)(act(g, p).coords())) <= 1e-9);
  }
}

TEST_CASE("opposition margin") {
  CHECK(opposition_margin(ProjPoint{1, 0}, ProjHyperplane{1, 0}) == doctest::Approx(1.0));
  CHECK(opposition_margin(ProjPoint{1, 0}, ProjHyperplane{0, 1}) == doctest::Approx(0.0));
  CHECK(opposition_margin(ProjPoint{1, 1}, ProjHyperplane{1, 0}) == doctest::Approx(1 / std::sqrt(2.0)));
}

TEST_CASE("flag opposition is symmetric and invariant") {
  std::mt19937_64 rng(4);
  int opposite = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 3;
    const ProjHyperplane ha = random_hyperplane(rng, d), hb = random_hyperplane(rng, d);
    const Flag a(point_on(rng, ha), ha), b(point_on(rng, hb), hb);
    const bool ab = flags_opposite(a, b);
    CHECK(ab == flags_opposite(b, a));
    const Matrix g = fixtures::random_invertible(rng, d);
    const Flag ga(act(g, a.point()), act_dual(g, a.hyperplane()), 1e-8);
    const Flag gb(act(g, b.point()), act_dual(g, b.hyperplane()), 1e-8);
    // Only compare away from the opposition threshold.
    const double m = std::min(opposition_margin(a.point(), b.hyperplane()), opposition_margin(b.point(), a.hyperplane()));
    if (m > 1e-3) {
      CHECK(flags_opposite(ga, gb));
      ++opposite;
    }
  }
  CHECK(opposite > 100);
  CHECK_THROWS_AS(Flag(ProjPoint{1, 0, 0}, ProjHyperplane{1, 0, 0}), Error);
}

TEST_CASE("affine chart examples") {
  const ProjHyperplane h{0, 1};
  for (double t : {-3.0, 0.0, 0.5, 7.0}) CHECK(affine_chart(h, rp1_from_real(t))[0] == doctest::Approx(t));

  const ProjHyperplane h3{1, 2, 2};
  const Vec origin = affine_chart(h3, ProjPoint{1, 2, 2});
  for (double x : origin) CHECK(std::abs(x) < 1e-15);
  CHECK_THROWS_AS(affine_chart(h3, ProjPoint{2, -1, 0}), Error);
}

TEST_CASE("affine chart round trip") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 2 + trial % 4;
    const ChartFrame frame(random_hyperplane(rng, d));
    Vec c(d - 1);
    for (double& x : c) x = uniform(rng, -5, 5);
    const ProjPoint p = frame.point(c);
    const Vec back = frame.coordinates(p);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(back[i] - c[i]) <= 1e-10 * std::max(1.0, std::abs(c[i])));
  }
}

TEST_CASE("chart images of balls avoiding the chart hyperplane are bounded") {
  std::mt19937_64 rng(6);
  const ChartFrame frame(ProjHyperplane{1, 0, 0});
  double sup = 0.0;
  for (int i = 0; i < 2000; ++i) {
    // FS ball of radius 1 about [1:0:0] stays 0.57 away from {x0 = 0}.
    const Vec dir = sphere_direction(i, 3, 9);
    const Vec tangent{0, dir[1], dir[2]};
    if (norm(tangent) < 1e-9) continue;
    const Vec p = geodesic_step(Vec{1, 0, 0}, normalized(tangent), uniform(rng, 0, 1.0));
    sup = std::max(sup, norm(frame.coordinates(p)));
  }
  CHECK(sup <= std::tan(1.0) + 1e-9);
}

TEST_CASE("cross ratio normalization on RP1") {
  const ProjHyperplane zero = rp1_kernel(rp1_from_real(0.0));
  const ProjHyperplane inf = rp1_kernel(rp1_from_real(INFINITY));
  for (double z : {-3.0, -1.0, 0.5, 2.0, 5.0, 10.0})
    CHECK(std::abs(cross_ratio(zero, inf, rp1_from_real(1.0), rp1_from_real(z)) - z) < 1e-12);
  CHECK(cross_ratio(zero, inf, rp1_from_real(3.0), rp1_from_real(3.0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cross_ratio(zero, inf, rp1_from_real(0.0), rp1_from_real(2.0)), Error);
}

TEST_CASE("cross ratio is projectively invariant and inverts under swapping") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 2 + trial % 3;
    const ProjHyperplane w1 = random_hyperplane(rng, d), w2 = random_hyperplane(rng, d);
    const ProjPoint z1 = random_point(rng, d), z2 = random_point(rng, d);
    if (opposition_margin(z1, w1) < 1e-2 || opposition_margin(z2, w2) < 1e-2 || opposition_margin(z2, w1) < 1e-2 ||
        opposition_margin(z1, w2) < 1e-2)
      continue;
    const double cr = cross_ratio(w1, w2, z1, z2);
    const Matrix g = fixtures::random_invertible(rng, d);
    const double moved = cross_ratio(act_dual(g, w1), act_dual(g, w2), act(g, z1), act(g, z2));
    CHECK(std::abs(moved - cr) <= 1e-9 * std::max(1.0, std::abs(cr)));
    CHECK(cr * cross_ratio(w1, w2, z2, z1) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("line through two points meets hyperplanes") {
  const ProjectiveLine l = line_through(ProjPoint{1, 0, 0}, ProjPoint{0, 1, 0});
  const ProjPoint x = intersect(l, ProjHyperplane{1, -1, 0});
  CHECK(fubini_study(x, ProjPoint{1, 1, 0}) < 1e-12);
  CHECK_THROWS_AS(intersect(l, ProjHyperplane{0, 0, 1}), Error);
  CHECK_THROWS_AS(line_through(ProjPoint{1, 0, 0}, ProjPoint{2, 0, 0}), Error);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const ProjPoint p = random_point(rng, 4), q = random_point(rng, 4);
    const ProjectiveLine line = line_through(p, q);
    const ProjHyperplane h1 = random_hyperplane(rng, 4), h2 = random_hyperplane(rng, 4);
    const ProjPoint a = intersect(line, h1), b = intersect(line, h2);
    CHECK(std::abs(h1(a.coords())) <= 1e-10 * norm(h1.covector()));
    CHECK(std::abs(h2(b.coords())) <= 1e-10 * norm(h2.covector()));
    // Cross-ratio of the two intersections against the basis points.
    if (opposition_margin(p, h1) > 1e-3 && opposition_margin(q, h2) > 1e-3)
      CHECK(std::isfinite(cross_ratio(h1, h2, p, q)));
  }
}

TEST_CASE("Fubini-Study distance is a metric") {
  CHECK(fubini_study(ProjPoint{1, 2, 3}, ProjPoint{-2, -4, -6}) < 1e-15);
  CHECK(fubini_study(ProjPoint{1, 0}, ProjPoint{0, 1}) == doctest::Approx(std::numbers::pi / 2));
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    const ProjPoint a = random_point(rng, 3), b = random_point(rng, 3), c = random_point(rng, 3);
    const double ab = fubini_study(a, b), bc = fubini_study(b, c), ac = fubini_study(a, c);
    CHECK(ac <= ab + bc + 1e-12);
    CHECK(ab == doctest::Approx(fubini_study(b, a)));
    CHECK(ab <= std::numbers::pi / 2 + 1e-15);
  }
}

TEST_CASE("geodesic steps move by the requested angle") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec p = normalized(random_point(rng, 3).coords());
    const Vec t = tangent_direction(p, random_point(rng, 3).coords());
    const double a = uniform(rng, 0, 1.5);
    CHECK(fubini_study(p, geodesic_step(p, t, a)) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("RP1 angle helpers") {
  CHECK(rp1_angle(rp1_from_angle(1.0)) == doctest::Approx(1.0));
  CHECK(fubini_study(rp1_from_real(INFINITY), ProjPoint{1, 0}) < 1e-15);
  CHECK(std::abs(rp1_kernel(ProjPoint{2, 3})(Vec{2, 3})) < 1e-15);
}
