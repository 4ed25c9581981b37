#pragma once

// Reference computations for the test suites. Everything here is written
// from scratch (long double, closed forms, brute force) and shares no code
// with the library, so agreement is evidence rather than tautology.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Real = long double;
using Dense = std::vector<std::vector<Real>>;

inline constexpr Real kPi = 3.141592653589793238462643383279502884L;

/// Singular values of a 2x2 matrix from the quadratic formula on m^T m.
inline std::array<Real, 2> singular_values_2x2(Real a, Real b, Real c, Real d) {
  const Real p = a * a + c * c;  // (m^T m)_{00}
  const Real q = a * b + c * d;
  const Real r = b * b + d * d;
  const Real tr = p + r;
  const Real det = std::abs(a * d - b * c);
  const Real disc = std::sqrt(std::max<Real>(0, tr * tr - 4 * det * det));
  const Real big = (tr + disc) / 2;
  (void)q;
  return {std::sqrt(big), det / std::sqrt(big)};
}

/// Eigenvalues of a symmetric matrix by cyclic two-sided Jacobi rotations,
/// sorted descending.
inline std::vector<Real> symmetric_eigenvalues(Dense a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 200; ++sweep) {
    Real off = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-60L) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0) continue;
        const Real theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const Real t = (theta >= 0 ? 1 : -1) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const Real c = 1 / std::sqrt(t * t + 1);
        const Real s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const Real akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Real apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<Real> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

/// Singular values as square roots of the eigenvalues of m^T m.
inline std::vector<Real> singular_values(const Dense& m) {
  const std::size_t n = m.size();
  Dense g(n, std::vector<Real>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) g[i][j] += m[k][i] * m[k][j];
  std::vector<Real> ev = symmetric_eigenvalues(g);
  for (Real& e : ev) e = std::sqrt(std::max<Real>(0, e));
  return ev;
}

inline Dense multiply(const Dense& a, const Dense& b) {
  const std::size_t n = a.size();
  Dense c(n, std::vector<Real>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Dense random_dense(std::mt19937_64& rng, std::size_t n, Real lo = -10, Real hi = 10) {
  std::uniform_real_distribution<double> u(static_cast<double>(lo), static_cast<double>(hi));
  Dense m(n, std::vector<Real>(n));
  for (auto& row : m)
    for (Real& x : row) x = u(rng);
  return m;
}

// ---------------------------------------------------------------- RP^1 --

/// Angle in [0, pi) of the RP^1 point (x, y).
inline Real angle_of(Real x, Real y) {
  Real a = std::atan2(y, x);
  if (a < 0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

/// Image of the angle a under the 2x2 matrix (p q; r s).
inline Real mobius_angle(const std::array<Real, 4>& m, Real a) {
  const Real x = std::cos(a), y = std::sin(a);
  return angle_of(m[0] * x + m[1] * y, m[2] * x + m[3] * y);
}

/// Arc [lo, lo + width] of RP^1 in angle coordinates (mod pi).
struct Arc {
  Real lo;
  Real width;
};

/// A projective map sends an arc to the arc between the endpoint images
/// that contains the image of the midpoint.
inline Arc mobius_arc(const std::array<Real, 4>& m, const Arc& arc) {
  Real a = mobius_angle(m, arc.lo);
  Real b = mobius_angle(m, arc.lo + arc.width);
  const Real mid = mobius_angle(m, arc.lo + arc.width / 2);
  auto fwd = [](Real from, Real to) {
    Real d = std::fmod(to - from, kPi);
    return d < 0 ? d + kPi : d;
  };
  if (fwd(a, mid) <= fwd(a, b)) return {a, fwd(a, b)};
  return {b, fwd(b, a)};
}

/// Signed inclusion margin of inner in outer: the smaller endpoint gap,
/// negative when inner sticks out.
inline Real arc_margin(const Arc& outer, const Arc& inner) {
  Real start = std::fmod(inner.lo - outer.lo, kPi);
  if (start < 0) start += kPi;
  if (start > outer.width + (kPi - outer.width) / 2) start -= kPi;
  return std::min(start, outer.width - (start + inner.width));
}

/// Hilbert-type distance log of the cross-ratio for points x < y in an
/// interval (a, b) of the real line.
inline Real interval_distance(Real a, Real b, Real x, Real y) {
  if (x > y) std::swap(x, y);
  return std::log(((b - x) * (y - a)) / ((x - a) * (b - y)));
}

// ------------------------------------------------------ planar domains --

struct P2 {
  Real x, y;
};

/// Exit parameters t_- < 0 < t_+ of the line c + t u from a convex
/// polygon (vertices in any order around a convex hull), by brute force
/// over every edge.
inline std::pair<Real, Real> polygon_section(const std::vector<P2>& poly, P2 c, P2 u) {
  Real lo = -std::numeric_limits<Real>::infinity(), hi = std::numeric_limits<Real>::infinity();
  // Hull centroid fixes the inward side of each edge.
  P2 g{0, 0};
  for (const P2& p : poly) {
    g.x += p.x / poly.size();
    g.y += p.y / poly.size();
  }
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const P2 a = poly[i], b = poly[(i + 1) % poly.size()];
    Real nx = b.y - a.y, ny = a.x - b.x;
    if (nx * (g.x - a.x) + ny * (g.y - a.y) > 0) {
      nx = -nx;
      ny = -ny;
    }
    // Half-plane n . (p - a) <= 0.
    const Real s0 = nx * (c.x - a.x) + ny * (c.y - a.y);
    const Real s1 = nx * u.x + ny * u.y;
    if (s1 > 0) hi = std::min(hi, -s0 / s1);
    if (s1 < 0) lo = std::max(lo, -s0 / s1);
  }
  return {lo, hi};
}

/// Exit parameters of c + t u from the disc of the given center and radius.
inline std::pair<Real, Real> disc_section(P2 center, Real r, P2 c, P2 u) {
  const Real dx = c.x - center.x, dy = c.y - center.y;
  const Real A = u.x * u.x + u.y * u.y;
  const Real B = 2 * (dx * u.x + dy * u.y);
  const Real C = dx * dx + dy * dy - r * r;
  const Real disc = std::sqrt(B * B - 4 * A * C);
  return {(-B - disc) / (2 * A), (-B + disc) / (2 * A)};
}

/// Cross-ratio distance between chart points x and y of a convex body
/// given by its section function.
template <class Section>
Real chart_distance(Section&& section, P2 x, P2 y) {
  const Real len = std::hypot(y.x - x.x, y.y - x.y);
  if (len == 0) return 0;
  const P2 u{(y.x - x.x) / len, (y.y - x.y) / len};
  const auto [lo, hi] = section(x, u);
  return interval_distance(lo, hi, 0, len);
}

/// Convex hull by monotone chain, counterclockwise.
inline std::vector<P2> convex_hull(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end(), [](P2 a, P2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  auto cross = [](P2 o, P2 a, P2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  std::vector<P2> h(2 * pts.size());
  std::size_t k = 0;
  for (const P2& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

/// Point-in-convex-polygon test with a margin.
inline bool inside_polygon(const std::vector<P2>& poly, P2 p, Real margin = 0) {
  const auto [lo, hi] = polygon_section(poly, p, {1, 0});
  const auto [lo2, hi2] = polygon_section(poly, p, {0, 1});
  return lo < -margin && hi > margin && lo2 < -margin && hi2 > margin;
}

/// Dense-grid brute force for inf C_inner / C_outer over pairs of grid
/// points of the inner body, plus tangent ratios along every grid
/// direction (the limit of the ratio as the pair collapses).
template <class Inner, class Outer>
Real grid_contraction(Inner&& inner, Outer&& outer, const std::vector<P2>& points, int directions) {
  Real best = std::numeric_limits<Real>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const Real co = chart_distance(outer, points[i], points[j]);
      if (co < 1e-12) continue;
      best = std::min(best, chart_distance(inner, points[i], points[j]) / co);
    }
    for (int d = 0; d < directions; ++d) {
      const Real a = kPi * d / directions;
      const P2 u{std::cos(a), std::sin(a)};
      const auto [li, hi] = inner(points[i], u);
      const auto [lo, ho] = outer(points[i], u);
      // d/dt log cross-ratio at t = 0 is 1/|t_-| + 1/t_+.
      const Real fi = 1 / -li + 1 / hi;
      const Real fo = 1 / -lo + 1 / ho;
      best = std::min(best, fi / fo);
    }
  }
  return best;
}

}  // namespace oracle
