#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "flagcert/domains.hpp"
#include "flagcert/errors.hpp"
#include "flagcert/sampling.hpp"
#include "oracles.hpp"

using namespace flagcert;

namespace {

const ProjHyperplane kPlaneChart{0, 0, 1};

Vec lift(const Vec& c) { return Vec{c[0], c[1], 1.0}; }
oracle::P2 p2(const Vec& c) { return {c[0], c[1]}; }

std::vector<Vec> random_polygon(std::mt19937_64& rng, double scale = 1.0) {
  for (;;) {
    std::vector<oracle::P2> pts;
    for (int i = 0; i < 9; ++i) pts.push_back({uniform(rng, -scale, scale), uniform(rng, -scale, scale)});
    const auto hull = oracle::convex_hull(pts);
    if (hull.size() < 4) continue;
    std::vector<Vec> out;
    for (const auto& p : hull) out.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
    if (oracle::inside_polygon(hull, {0, 0}, 0.2 * scale)) return out;
  }
}

std::vector<oracle::P2> as_p2(const std::vector<Vec>& vs) {
  std::vector<oracle::P2> out;
  for (const Vec& v : vs) out.push_back(p2(v));
  return out;
}

// Random point of a convex polygon, by rejection.
Vec point_in(std::mt19937_64& rng, const std::vector<oracle::P2>& poly, double margin) {
  for (;;) {
    const Vec c{uniform(rng, -2, 2), uniform(rng, -2, 2)};
    if (oracle::inside_polygon(poly, p2(c), margin)) return c;
  }
}

Matrix random_affine(std::mt19937_64& rng) {
  for (;;) {
    Matrix g = Matrix::identity(3);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) g(i, j) = uniform(rng, -2, 2);
      g(i, 2) = uniform(rng, -1, 1);
    }
    if (std::abs(determinant(g)) > 0.3) return g;
  }
}

}  // namespace

TEST_CASE("interval metric matches the boundary cross-ratio") {
  const ProperDomain omega = ProperDomain::rp1_interval(-1, 1);
  CHECK(zimmer_metric(omega, rp1_from_real(0), rp1_from_real(0.5)) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  for (int i = 1; i <= 50; ++i) {
    const double t = -0.98 + 1.96 * (i - 0.5) / 50;
    const double want = static_cast<double>(oracle::interval_distance(-1, 1, 0, t));
    CHECK(std::abs(zimmer_metric(omega, rp1_from_real(0), rp1_from_real(t)) - want) <= 1e-9);
  }
  CHECK(zimmer_metric(omega, rp1_from_real(0.3), rp1_from_real(0.3)) == 0.0);
  CHECK_THROWS_AS(zimmer_metric(omega, rp1_from_real(0), rp1_from_real(2)), Error);
}

TEST_CASE("exact polygon metric agrees with a brute-force line-section oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto verts = random_polygon(rng);
    const auto poly = as_p2(verts);
    const ProperDomain omega = ProperDomain::polytope(kPlaneChart, verts);
    auto section = [&](oracle::P2 c, oracle::P2 u) { return oracle::polygon_section(poly, c, u); };
    for (int k = 0; k < 20; ++k) {
      const Vec x = point_in(rng, poly, 1e-3), y = point_in(rng, poly, 1e-3);
      const double want = static_cast<double>(oracle::chart_distance(section, p2(x), p2(y)));
      CHECK(std::abs(zimmer_metric_exact(omega, lift(x), lift(y)) - want) <= 1e-9 * std::max(1.0, want));
    }
  }
}

TEST_CASE("exact ball metric agrees with the disc oracle") {
  const ProperDomain omega = ProperDomain::chart_ball(kPlaneChart, {0.2, -0.1}, 0.7);
  auto section = [](oracle::P2 c, oracle::P2 u) { return oracle::disc_section({0.2, -0.1}, 0.7, c, u); };
  std::mt19937_64 rng(22);
  for (int k = 0; k < 200; ++k) {
    Vec x, y;
    do x = {uniform(rng, -0.5, 0.9), uniform(rng, -0.8, 0.6)}; while (!omega.contains(lift(x)));
    do y = {uniform(rng, -0.5, 0.9), uniform(rng, -0.8, 0.6)}; while (!omega.contains(lift(y)));
    const double want = static_cast<double>(oracle::chart_distance(section, p2(x), p2(y)));
    CHECK(std::abs(zimmer_metric_exact(omega, lift(x), lift(y)) - want) <= 1e-9 * std::max(1.0, want));
  }
}

TEST_CASE("sampled supremum approaches the exact polygon value from below") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const auto verts = random_polygon(rng);
    const auto poly = as_p2(verts);
    const ProperDomain omega = ProperDomain::polytope(kPlaneChart, verts, trial);
    for (int k = 0; k < 20; ++k) {
      const Vec x = point_in(rng, poly, 1e-2), y = point_in(rng, poly, 1e-2);
      const double exact = zimmer_metric_exact(omega, lift(x), lift(y));
      const SampledMetric s = zimmer_metric_sampled(omega, lift(x), lift(y), 10000);
      CHECK(s.lower_bound);
      CHECK(s.value <= exact + 1e-9);
      CHECK(s.value >= 0.98 * exact);
    }
  }
}

TEST_CASE("metric axioms on exact domains") {
  std::mt19937_64 rng(24);
  const auto verts = random_polygon(rng);
  const auto poly = as_p2(verts);
  const ProperDomain omega = ProperDomain::polytope(kPlaneChart, verts);
  for (int k = 0; k < 300; ++k) {
    const Vec x = lift(point_in(rng, poly, 1e-3)), y = lift(point_in(rng, poly, 1e-3)), z = lift(point_in(rng, poly, 1e-3));
    const double xy = zimmer_metric_exact(omega, x, y);
    CHECK(std::abs(xy - zimmer_metric_exact(omega, y, x)) <= 1e-10);
    if (fubini_study(x, y) > 1e-6) CHECK(xy > 0.0);
    CHECK(zimmer_metric_exact(omega, x, z) <= xy + zimmer_metric_exact(omega, y, z) + 1e-8);
  }
}

TEST_CASE("smaller domains have larger distances") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    const auto outer_v = random_polygon(rng, 1.5);
    std::vector<Vec> inner_v;
    for (const Vec& v : outer_v) inner_v.push_back({0.6 * v[0], 0.6 * v[1]});
    const ProperDomain outer = ProperDomain::polytope(kPlaneChart, outer_v);
    const ProperDomain inner = ProperDomain::polytope(kPlaneChart, inner_v);
    const auto poly = as_p2(inner_v);
    for (int k = 0; k < 30; ++k) {
      const Vec x = lift(point_in(rng, poly, 1e-3)), y = lift(point_in(rng, poly, 1e-3));
      CHECK(zimmer_metric_exact(inner, x, y) >= zimmer_metric_exact(outer, x, y) - 1e-9);
    }
  }
}

TEST_CASE("metric is invariant under projective maps") {
  std::mt19937_64 rng(26);
  const auto verts = random_polygon(rng);
  const auto poly = as_p2(verts);
  const ProperDomain omega = ProperDomain::polytope(kPlaneChart, verts);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix g = random_affine(rng);
    const ProperDomain gomega = omega.transformed(g);
    CHECK(gomega.is_exact());
    const Vec x = lift(point_in(rng, poly, 1e-2)), y = lift(point_in(rng, poly, 1e-2));
    const double before = zimmer_metric_exact(omega, x, y);
    CHECK(std::abs(zimmer_metric_exact(gomega, g.apply(x), g.apply(y)) - before) <= 1e-9 * std::max(1.0, before));
  }
  // A general projective map of RP^1 keeps an interval an interval.
  const ProperDomain interval = ProperDomain::rp1_interval(-1, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix g = fixtures::random_invertible(rng, 2);
    const ProjPoint x = rp1_from_real(uniform(rng, -0.9, 1.9)), y = rp1_from_real(uniform(rng, -0.9, 1.9));
    const ProperDomain gi = interval.transformed(g);
    const double before = zimmer_metric(interval, x, y);
    CHECK(std::abs(zimmer_metric(gi, act(g, x), act(g, y)) - before) <= 1e-9 * std::max(1.0, before));
  }
}

TEST_CASE("diameters") {
  const ProperDomain outer = ProperDomain::chart_ball(kPlaneChart, {0, 0}, 1.0);
  CHECK(diameter(outer, std::vector<Vec>{{0.1, 0.2, 1}}).value == 0.0);

  // Inner ball of half the radius: the widest pair sits on a diameter.
  const ProperDomain inner = ProperDomain::chart_ball(kPlaneChart, {0, 0}, 0.5);
  const double exact = static_cast<double>(oracle::interval_distance(-1, 1, -0.5, 0.5));
  const double d = diameter(outer, inner, 4000).value;
  CHECK(d <= exact + 1e-9);
  CHECK(d >= 0.97 * exact);

  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(lift({uniform(rng, -0.6, 0.6), uniform(rng, -0.6, 0.6)}));
    const std::vector<Vec> subset(pts.begin(), pts.begin() + 6);
    CHECK(diameter(outer, subset).value <= diameter(outer, pts).value);
  }
  CHECK_THROWS_AS(diameter(outer, std::vector<Vec>{{3, 0, 1}}), Error);
}

TEST_CASE("contraction of nested intervals") {
  const double lam = rp1_contraction_lambda(-2, -1, 1, 2);
  CHECK(lam > 1.0);
  CHECK(std::isinf(rp1_contraction_lambda(INFINITY, -1, 1, INFINITY)));

  // Tighter nesting contracts more; nearly equal intervals barely do.
  double prev = 0.0;
  for (double s : {1.5, 1.0, 0.5, 0.1, 0.01}) {
    const double l = rp1_contraction_lambda(-2, -s, s, 2);
    CHECK(l > prev);
    prev = l;
  }
  prev = INFINITY;
  for (double e : {1.0, 0.1, 0.01, 0.001}) {
    const double l = rp1_contraction_lambda(-1 - e, -1, 1, 1 + e);
    CHECK(l < prev);
    CHECK(l > 1.0);
    prev = l;
  }
  CHECK(prev < 1.1);
  CHECK_THROWS_AS(rp1_contraction_lambda(-1, -2, 1, 2), Error);

  // The domain-level estimate agrees with the quadruple formula.
  const auto est = contraction_factor(ProperDomain::rp1_interval(-1, 1), ProperDomain::rp1_interval(-2, 2), 2000);
  CHECK(est.lambda == doctest::Approx(lam).epsilon(1e-3));
}

TEST_CASE("contraction quadruple is projectively invariant") {
  std::mt19937_64 rng(28);
  const double lam = rp1_contraction_lambda(-2, -1, 1, 2);
  int used = 0;
  while (used < 20) {
    const Matrix g = fixtures::random_invertible(rng, 2);
    auto img = [&](double t) {
      const Vec v = g.apply(Vec{t, 1});
      return v[1] == 0.0 ? INFINITY : v[0] / v[1];
    };
    try {
      CHECK(rp1_contraction_lambda(img(-2), img(-1), img(1), img(2)) == doctest::Approx(lam).epsilon(1e-3));
      ++used;
    } catch (const Error&) {
      // Orientation reversal reorders the images; try the reversed quadruple.
      CHECK(rp1_contraction_lambda(img(2), img(1), img(-1), img(-2)) == doctest::Approx(lam).epsilon(1e-3));
      ++used;
    }
  }
}

TEST_CASE("contraction of concentric balls matches the dense-grid oracle") {
  const ProperDomain inner = ProperDomain::chart_ball(kPlaneChart, {0, 0}, 0.3);
  const ProperDomain outer = ProperDomain::chart_ball(kPlaneChart, {0, 0}, 0.5);
  const auto est = contraction_factor(inner, outer, 4000);
  std::vector<oracle::P2> grid;
  for (int i = -12; i <= 12; ++i)
    for (int j = -12; j <= 12; ++j)
      if (std::hypot(i, j) < 11.5) grid.push_back({0.3L * i / 12, 0.3L * j / 12});
  auto in = [](oracle::P2 c, oracle::P2 u) { return oracle::disc_section({0, 0}, 0.3, c, u); };
  auto out = [](oracle::P2 c, oracle::P2 u) { return oracle::disc_section({0, 0}, 0.5, c, u); };
  const double want = static_cast<double>(oracle::grid_contraction(in, out, grid, 36));
  CHECK(est.lambda > 1.0 + 1e-3);
  CHECK(est.lambda == doctest::Approx(want).epsilon(0.02));
  CHECK(est.nesting_margin > 0.0);
}

TEST_CASE("contraction requires strict nesting") {
  const ProperDomain a = ProperDomain::chart_ball(kPlaneChart, {0, 0}, 0.5);
  const ProperDomain b = ProperDomain::chart_ball(kPlaneChart, {0.3, 0}, 0.5);
  CHECK_THROWS_AS(contraction_factor(a, b, 100), Error);
  CHECK_THROWS_AS(contraction_factor(a, a, 100), Error);
}

TEST_CASE("domain membership, margins and samplers") {
  const ProperDomain ball = ProperDomain::chart_ball(kPlaneChart, {0, 0}, 1.0, 5);
  CHECK(ball.contains(Vec{0.5, 0.5, 1}));
  CHECK_FALSE(ball.contains(Vec{1.5, 0, 1}));
  CHECK(ball.margin(Vec{0, 0, 1}) > 0.0);
  CHECK(ball.margin(Vec{2, 0, 1}) < 0.0);
  CHECK(ball.closure_margin() > 0.0);
  for (std::uint64_t i = 0; i < 100; ++i) {
    CHECK(std::abs(ball.margin(ball.boundary_sample(i))) < 1e-9);
    CHECK(ball.contains(ball.interior_sample(i)));
    CHECK(ball.boundary_sample(i) == ball.boundary_sample(i));
  }
  const ProperDomain same_seed = ProperDomain::chart_ball(kPlaneChart, {0, 0}, 1.0, 5);
  CHECK(ball.interior_sample(17) == same_seed.interior_sample(17));

  const ProperDomain fs = ProperDomain::fs_ball(ProjPoint{1, 0, 0}, 0.4);
  CHECK(fs.margin(Vec{1, 0, 0}) == doctest::Approx(0.4));
  CHECK_THROWS_AS(ProperDomain::fs_ball(ProjPoint{1, 0}, 2.0), Error);
  CHECK_THROWS_AS(ProperDomain::rp1_interval(1, -1), Error);
}

TEST_CASE("dual domain hyperplanes avoid the closure") {
  const ProperDomain omega = ProperDomain::polytope(kPlaneChart, {{-1, -1}, {1, -1}, {0, 1}});
  const DualDomain dual(omega);
  for (const ProjHyperplane& h : dual.pool(200)) CHECK(dual.contains(h, 512, 0.0));
  CHECK_FALSE(dual.contains(ProjHyperplane{1, 0, 0}));  // x = 0 cuts the triangle
}

TEST_CASE("ball unions are sampled and report lower bounds") {
  const ProperDomain u =
      ProperDomain::ball_union(kPlaneChart, {{{-1, 0}, 0.6}, {{1, 0}, 0.6}}, 3);
  CHECK_FALSE(u.is_exact());
  CHECK(u.contains(Vec{-1, 0, 1}));
  CHECK_FALSE(u.contains(Vec{0, 0, 1}));
  const SampledMetric m = zimmer_metric_sampled(u, Vec{-1, 0, 1}, Vec{1, 0, 1}, 2000);
  CHECK(m.lower_bound);
  CHECK(m.value > 0.0);
  // A box around the union has a smaller dual, so its metric is a floor
  // for the true value; the sampled lower bound lands close to it.
  const ProperDomain box =
      ProperDomain::polytope(kPlaneChart, {{-1.6, -0.6}, {1.6, -0.6}, {1.6, 0.6}, {-1.6, 0.6}});
  CHECK(m.value >= 0.98 * zimmer_metric_exact(box, Vec{-1, 0, 1}, Vec{1, 0, 1}));
}
