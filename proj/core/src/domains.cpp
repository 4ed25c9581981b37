#include "flagcert/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "flagcert/errors.hpp"
#include "flagcert/sampling.hpp"

namespace flagcert {

namespace {

constexpr std::size_t kBoundaryCache = 2048;
constexpr std::size_t kMaxPolytopeVertices = 64;
constexpr double kInf = std::numeric_limits<double>::infinity();

Vec sub(std::span<const double> a, std::span<const double> b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

double dist(std::span<const double> a, std::span<const double> b) { return norm(sub(a, b)); }

// Unit normal to the affine span of m points in R^m (generalized cross
// product of the edge vectors); empty when the points are dependent.
Vec affine_normal(const std::vector<Vec>& pts) {
  const std::size_t m = pts.front().size();
  if (m == 1) return {1.0};
  std::vector<Vec> rows;
  for (std::size_t i = 1; i < pts.size(); ++i) rows.push_back(sub(pts[i], pts[0]));
  Vec n(m);
  for (std::size_t j = 0; j < m; ++j) {
    Matrix minor(m - 1);
    for (std::size_t r = 0; r < m - 1; ++r) {
      std::size_t cc = 0;
      for (std::size_t c = 0; c < m; ++c) {
        if (c == j) continue;
        minor(r, cc++) = rows[r][c];
      }
    }
    const double det = determinant(minor);
    n[j] = ((j % 2) == 0 ? det : -det);
  }
  const double len = norm(n);
  double scale = 0.0;
  for (const Vec& r : rows) scale = std::max(scale, norm(r));
  if (!(len > 1e-12 * std::pow(std::max(scale, 1e-300), static_cast<double>(m - 1)))) return {};
  for (double& x : n) x /= len;
  return n;
}

// Lifts a chart point to a unit homogeneous vector on the positive side of
// the chart normal.
Vec unit_lift(const ChartFrame& frame, std::span<const double> c) { return normalized(frame.lift(c)); }

// Orients a homogeneous vector so that it pairs positively with the normal.
Vec oriented(const ChartFrame& frame, std::span<const double> x) {
  Vec v(x.begin(), x.end());
  if (dot(frame.normal(), v) < 0.0)
    for (double& e : v) e = -e;
  return v;
}

Vec dirichlet_weights(const Vec& u) {
  Vec w(u.size());
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    w[i] = -std::log(std::max(1e-300, 1.0 - u[i]));
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

Vec combine(const std::vector<Vec>& pts, const std::vector<std::size_t>& idx, const Vec& w) {
  Vec c(pts[idx.front()].size(), 0.0);
  for (std::size_t i = 0; i < idx.size(); ++i) c = axpy(w[i], pts[idx[i]], c);
  return c;
}

}  // namespace

ProperDomain ProperDomain::chart_ball(const ProjHyperplane& chart, Vec center, double radius, std::uint64_t seed) {
  if (center.size() + 1 != chart.dim()) fail(ErrorCode::DimensionMismatch, "ball center has wrong chart dimension");
  if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorCode::InvalidDomain, "ball radius must be positive and finite");
  ProperDomain d;
  d.kind_ = DomainKind::ChartBall;
  d.frame_ = ChartFrame(chart);
  d.balls_.push_back({std::move(center), radius});
  d.seed_ = seed;
  d.finish();
  return d;
}

ProperDomain ProperDomain::fs_ball(const ProjPoint& center, double radius, std::uint64_t seed) {
  if (!(radius > 0.0) || !(radius < std::numbers::pi / 2)) fail(ErrorCode::InvalidDomain, "FS ball radius must lie in (0, pi/2)");
  return chart_ball(ProjHyperplane(center.coords()), Vec(center.dim() - 1, 0.0), std::tan(radius), seed);
}

ProperDomain ProperDomain::polytope(const ProjHyperplane& chart, std::vector<Vec> vertices, std::uint64_t seed) {
  const std::size_t m = chart.dim() - 1;
  if (vertices.size() < m + 1) fail(ErrorCode::InvalidDomain, "polytope needs at least d vertices");
  if (vertices.size() > kMaxPolytopeVertices) fail(ErrorCode::InvalidDomain, "polytope has too many vertices");
  for (const Vec& v : vertices)
    if (v.size() != m) fail(ErrorCode::DimensionMismatch, "polytope vertex has wrong chart dimension");
  ProperDomain d;
  d.kind_ = DomainKind::ConvexPolytope;
  d.frame_ = ChartFrame(chart);
  d.vertices_ = std::move(vertices);
  d.seed_ = seed;
  d.finish();
  return d;
}

ProperDomain ProperDomain::ball_union(const ProjHyperplane& chart, std::vector<ChartBallSpec> balls, std::uint64_t seed) {
  if (balls.empty()) fail(ErrorCode::InvalidDomain, "union needs at least one ball");
  for (const ChartBallSpec& b : balls) {
    if (b.center.size() + 1 != chart.dim()) fail(ErrorCode::DimensionMismatch, "ball center has wrong chart dimension");
    if (!(b.radius > 0.0) || !std::isfinite(b.radius)) fail(ErrorCode::InvalidDomain, "ball radius must be positive");
  }
  ProperDomain d;
  d.kind_ = DomainKind::SampledSet;
  d.frame_ = ChartFrame(chart);
  d.balls_ = std::move(balls);
  d.seed_ = seed;
  d.finish();
  return d;
}

ProperDomain ProperDomain::rp1_interval(double lo, double hi, std::uint64_t seed) {
  if (!(lo < hi)) fail(ErrorCode::InvalidDomain, "interval endpoints out of order");
  return chart_ball(ProjHyperplane{0.0, 1.0}, Vec{0.5 * (lo + hi)}, 0.5 * (hi - lo), seed);
}

void ProperDomain::finish() {
  const std::size_t m = dim() - 1;
  if (m == 0) fail(ErrorCode::InvalidDomain, "domains need d >= 2");

  if (kind_ == DomainKind::ConvexPolytope) {
    const auto subsets = k_subsets(vertices_.size(), m);
    double scale = 0.0;
    for (const Vec& v : vertices_) scale = std::max(scale, norm(v));
    const double tol = 1e-10 * std::max(1.0, scale);
    for (const auto& s : subsets) {
      std::vector<Vec> pts;
      for (std::size_t i : s) pts.push_back(vertices_[i]);
      Vec n = affine_normal(pts);
      if (n.empty()) continue;
      double off = dot(n, pts[0]);
      bool below = true, above = true;
      for (const Vec& v : vertices_) {
        const double t = dot(n, v) - off;
        below = below && t <= tol;
        above = above && t >= -tol;
      }
      if (!below && !above) continue;
      if (!below) {
        for (double& x : n) x = -x;
        off = -off;
      }
      const bool seen = std::any_of(facets_.begin(), facets_.end(), [&](const Facet& f) {
        return dist(f.normal, n) < 1e-9 && std::abs(f.offset - off) < tol;
      });
      if (seen) continue;
      std::vector<std::size_t> on;
      for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (std::abs(dot(n, vertices_[i]) - off) <= tol) on.push_back(i);
      facets_.push_back({n, off});
      facet_vertices_.push_back(std::move(on));
    }
    if (facets_.size() < m + 1) fail(ErrorCode::InvalidDomain, "polytope is not full-dimensional");
  }

  if (kind_ == DomainKind::ChartBall && norm(balls_.front().center) <= 1e-15) fs_ball_ = true;

  if (m == 1) {
    std::vector<std::pair<double, double>> iv;
    if (kind_ == DomainKind::ConvexPolytope) {
      double lo = kInf, hi = -kInf;
      for (const Vec& v : vertices_) {
        lo = std::min(lo, v[0]);
        hi = std::max(hi, v[0]);
      }
      iv.emplace_back(lo, hi);
    } else {
      for (const ChartBallSpec& b : balls_) iv.emplace_back(b.center[0] - b.radius, b.center[0] + b.radius);
      std::sort(iv.begin(), iv.end());
      std::vector<std::pair<double, double>> merged;
      for (const auto& p : iv) {
        if (!merged.empty() && p.first <= merged.back().second)
          merged.back().second = std::max(merged.back().second, p.second);
        else
          merged.push_back(p);
      }
      iv = std::move(merged);
    }
    for (const auto& [lo, hi] : iv) {
      endpoints_.push_back(unit_lift(frame_, Vec{lo}));
      endpoints_.push_back(unit_lift(frame_, Vec{hi}));
    }
    return;
  }

  if (kind_ == DomainKind::SampledSet) {
    for (std::uint64_t j = 0; boundary_cache_.size() < kBoundaryCache && j < 32 * kBoundaryCache; ++j) {
      bool ok = false;
      Vec p = union_boundary_point(j, ok);
      if (ok) boundary_cache_.push_back(std::move(p));
    }
    if (boundary_cache_.empty()) fail(ErrorCode::InvalidDomain, "union boundary could not be sampled");
  } else if (kind_ == DomainKind::ChartBall && !fs_ball_) {
    for (std::uint64_t j = 0; j < kBoundaryCache; ++j) boundary_cache_.push_back(boundary_sample(j));
  }
}

Vec ProperDomain::union_boundary_point(std::uint64_t index, bool& ok) const {
  const std::size_t m = dim() - 1;
  const std::size_t k = index % balls_.size();
  const Vec dir = sphere_direction(index / balls_.size(), m, mix_seed(seed_, 11));
  const Vec c = axpy(balls_[k].radius, dir, balls_[k].center);
  ok = true;
  for (std::size_t l = 0; l < balls_.size() && ok; ++l)
    if (l != k && dist(c, balls_[l].center) < balls_[l].radius) ok = false;
  return unit_lift(frame_, c);
}

bool ProperDomain::contains(std::span<const double> x) const {
  Vec c;
  try {
    c = frame_.coordinates(x);
  } catch (const Error&) {
    return false;
  }
  switch (kind_) {
    case DomainKind::ConvexPolytope:
      return std::all_of(facets_.begin(), facets_.end(), [&](const Facet& f) { return dot(f.normal, c) < f.offset; });
    default:
      return std::any_of(balls_.begin(), balls_.end(),
                         [&](const ChartBallSpec& b) { return dist(c, b.center) < b.radius; });
  }
}

double ProperDomain::margin(std::span<const double> x) const {
  if (x.size() != dim()) fail(ErrorCode::DimensionMismatch, "margin dimension mismatch");
  const bool inside = contains(x);
  if (!endpoints_.empty()) {
    double best = kInf;
    for (const Vec& e : endpoints_) best = std::min(best, fubini_study(x, e));
    return inside ? best : -best;
  }
  if (fs_ball_) return std::atan(balls_.front().radius) - fubini_study(x, frame_.normal());
  if (kind_ == DomainKind::ConvexPolytope) {
    // Distance from a point of a convex cone to its complement is the
    // smallest distance to a facet great-sphere.
    const Vec u = normalized(x);
    double best_orient = -kInf;
    for (double sign : {1.0, -1.0}) {
      double worst = kInf;
      for (const Facet& f : facets_) {
        Vec w = frame_.normal();
        for (double& e : w) e *= f.offset;
        for (std::size_t j = 0; j < f.normal.size(); ++j) w = axpy(-f.normal[j], frame_.basis()[j], w);
        worst = std::min(worst, sign * dot(w, u) / norm(w));
      }
      best_orient = std::max(best_orient, worst);
    }
    const double v = std::asin(std::clamp(best_orient, -1.0, 1.0));
    return inside ? std::max(v, 0.0) : std::min(v, 0.0);
  }
  return sampled_margin(x, inside);
}

double ProperDomain::sampled_margin(std::span<const double> x, bool inside) const {
  std::size_t arg = 0;
  double best = kInf;
  for (std::size_t i = 0; i < boundary_cache_.size(); ++i) {
    const double d = fubini_study(x, boundary_cache_[i]);
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  // Local pattern search on the sphere of the ball owning the best sample.
  const std::size_t m = dim() - 1;
  const Vec c = frame_.coordinates(boundary_cache_[arg], 0.0);
  std::size_t k = 0;
  double closest = kInf;
  for (std::size_t l = 0; l < balls_.size(); ++l) {
    const double e = std::abs(dist(c, balls_[l].center) - balls_[l].radius);
    if (e < closest) {
      closest = e;
      k = l;
    }
  }
  Vec dir = normalized(sub(c, balls_[k].center));
  double step = 0.1;
  for (int it = 0; it < 40; ++it) {
    bool improved = false;
    for (std::size_t j = 0; j < m; ++j) {
      for (double s : {step, -step}) {
        Vec trial = dir;
        trial[j] += s;
        trial = normalized(trial);
        const Vec p = axpy(balls_[k].radius, trial, balls_[k].center);
        bool on_boundary = true;
        for (std::size_t l = 0; l < balls_.size() && on_boundary; ++l)
          if (l != k && dist(p, balls_[l].center) < balls_[l].radius) on_boundary = false;
        if (!on_boundary) continue;
        const double dd = fubini_study(x, unit_lift(frame_, p));
        if (dd < best) {
          best = dd;
          dir = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return inside ? best : -best;
}

Vec ProperDomain::boundary_sample(std::uint64_t index) const {
  const std::size_t m = dim() - 1;
  if (!endpoints_.empty()) return endpoints_[index % endpoints_.size()];
  switch (kind_) {
    case DomainKind::ChartBall: {
      const ChartBallSpec& b = balls_.front();
      return unit_lift(frame_, axpy(b.radius, sphere_direction(index, m, mix_seed(seed_, 11)), b.center));
    }
    case DomainKind::ConvexPolytope: {
      if (index < vertices_.size()) return unit_lift(frame_, vertices_[index]);
      const std::uint64_t j = index - vertices_.size();
      const std::size_t f = j % facets_.size();
      const auto& on = facet_vertices_[f];
      const Vec w = dirichlet_weights(halton_point(j / facets_.size(), on.size(), mix_seed(seed_, 100 + f)));
      return unit_lift(frame_, combine(vertices_, on, w));
    }
    case DomainKind::SampledSet:
      return boundary_cache_[index % boundary_cache_.size()];
  }
  return {};
}

Vec ProperDomain::interior_sample(std::uint64_t index) const {
  const std::size_t m = dim() - 1;
  switch (kind_) {
    case DomainKind::ConvexPolytope: {
      std::vector<std::size_t> all(vertices_.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      const Vec w = dirichlet_weights(halton_point(index, all.size(), mix_seed(seed_, 23)));
      return unit_lift(frame_, combine(vertices_, all, w));
    }
    default: {
      const ChartBallSpec& b = balls_[index % balls_.size()];
      const Vec p = ball_point(index / balls_.size(), m, mix_seed(seed_, 29));
      return unit_lift(frame_, axpy(b.radius, p, b.center));
    }
  }
}

Vec ProperDomain::push_outward(std::span<const double> boundary_point, double eps) const {
  const Vec x = normalized(oriented(frame_, boundary_point));
  const Vec c = frame_.coordinates(x, 0.0);
  Vec nu;
  if (kind_ == DomainKind::ConvexPolytope) {
    double best = kInf;
    for (const Facet& f : facets_) {
      const double slack = f.offset - dot(f.normal, c);
      if (slack < best) {
        best = slack;
        nu = f.normal;
      }
    }
  } else {
    double best = kInf;
    for (const ChartBallSpec& b : balls_) {
      const double e = std::abs(dist(c, b.center) - b.radius);
      if (e < best) {
        best = e;
        nu = sub(c, b.center);
      }
    }
    if (norm(nu) == 0.0) nu.assign(c.size(), 0.0), nu[0] = 1.0;
    nu = normalized(nu);
  }
  Vec lifted(dim(), 0.0);
  for (std::size_t j = 0; j < nu.size(); ++j) lifted = axpy(nu[j], frame_.basis()[j], lifted);
  const Vec t = tangent_direction(x, lifted);
  return geodesic_step(x, t, eps);
}

std::vector<Vec> ProperDomain::neighborhood_samples(double eps, std::size_t budget) const {
  std::vector<Vec> out;
  const std::size_t nb = !endpoints_.empty() ? endpoints_.size() : std::max<std::size_t>(1, budget / 4);
  for (std::size_t i = 0; i < nb; ++i) {
    const Vec b = boundary_sample(i);
    out.push_back(push_outward(b, eps));
    out.push_back(push_outward(b, 0.5 * eps));
    out.push_back(b);
  }
  const std::size_t ni = budget > out.size() ? budget - out.size() : std::size_t{1};
  for (std::size_t i = 0; i < ni; ++i) out.push_back(interior_sample(i));
  return out;
}

double ProperDomain::closure_margin(std::size_t budget) const {
  double best = 1.0;
  const std::size_t n = !endpoints_.empty() ? endpoints_.size() : budget;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec b = boundary_sample(i);
    best = std::min(best, std::abs(dot(frame_.normal(), b)) / norm(b));
  }
  return best;
}

double ProperDomain::support(std::span<const double> u) const {
  double s = -kInf;
  if (kind_ == DomainKind::ConvexPolytope) {
    for (const Vec& v : vertices_) s = std::max(s, dot(u, v));
  } else {
    for (const ChartBallSpec& b : balls_) s = std::max(s, dot(u, b.center) + b.radius * norm(u));
  }
  return s;
}

Vec ProperDomain::chart_center() const {
  const std::size_t m = dim() - 1;
  Vec c(m, 0.0);
  if (kind_ == DomainKind::ConvexPolytope) {
    for (const Vec& v : vertices_) c = axpy(1.0 / static_cast<double>(vertices_.size()), v, c);
  } else {
    c = balls_.front().center;
  }
  return c;
}

double ProperDomain::chart_radius() const {
  const Vec c = chart_center();
  double r = 0.0;
  if (kind_ == DomainKind::ConvexPolytope) {
    for (const Vec& v : vertices_) r = std::max(r, dist(v, c));
  } else {
    for (const ChartBallSpec& b : balls_) r = std::max(r, dist(b.center, c) + b.radius);
  }
  return r;
}

LineSection ProperDomain::line_section(std::span<const double> c, std::span<const double> u) const {
  LineSection s{-kInf, kInf};
  switch (kind_) {
    case DomainKind::ChartBall: {
      const ChartBallSpec& b = balls_.front();
      const Vec w = sub(c, b.center);
      const double bb = dot(u, w);
      const double q = (norm(w) - b.radius) * (norm(w) + b.radius);
      if (!(q < 0.0)) fail(ErrorCode::NotInDomain, "line section base point is outside the ball");
      const double disc = std::sqrt(bb * bb - q);
      if (bb >= 0.0) {
        s.t_minus = -bb - disc;
        s.t_plus = q / s.t_minus;
      } else {
        s.t_plus = -bb + disc;
        s.t_minus = q / s.t_plus;
      }
      return s;
    }
    case DomainKind::ConvexPolytope: {
      for (const Facet& f : facets_) {
        const double slack = f.offset - dot(f.normal, c);
        if (!(slack > 0.0)) fail(ErrorCode::NotInDomain, "line section base point is outside the polytope");
        const double den = dot(f.normal, u);
        if (den > 0.0) s.t_plus = std::min(s.t_plus, slack / den);
        if (den < 0.0) s.t_minus = std::max(s.t_minus, slack / den);
      }
      return s;
    }
    case DomainKind::SampledSet:
      break;
  }
  fail(ErrorCode::InvalidDomain, "line sections need a ball or polytope domain");
}

ProperDomain ProperDomain::transformed(const Matrix& g) const {
  if (g.dim() != dim()) fail(ErrorCode::DimensionMismatch, "transform dimension mismatch");
  const ProjHyperplane chart = act_dual(g, frame_.hyperplane());
  const ChartFrame nf(chart);
  auto image = [&](std::span<const double> c) { return nf.coordinates(g.apply(frame_.lift(c)), 0.0); };
  if (kind_ == DomainKind::ConvexPolytope) {
    std::vector<Vec> vs;
    for (const Vec& v : vertices_) vs.push_back(image(v));
    return polytope(chart, std::move(vs), seed_);
  }
  if (dim() == 2) {
    if (kind_ == DomainKind::ChartBall) {
      const ChartBallSpec& b = balls_.front();
      const double lo = image(Vec{b.center[0] - b.radius})[0];
      const double hi = image(Vec{b.center[0] + b.radius})[0];
      return chart_ball(chart, Vec{0.5 * (lo + hi)}, 0.5 * std::abs(hi - lo), seed_);
    }
    std::vector<ChartBallSpec> bs;
    for (const ChartBallSpec& b : balls_) {
      const double lo = image(Vec{b.center[0] - b.radius})[0];
      const double hi = image(Vec{b.center[0] + b.radius})[0];
      bs.push_back({Vec{0.5 * (lo + hi)}, 0.5 * std::abs(hi - lo)});
    }
    return ball_union(chart, std::move(bs), seed_);
  }
  fail(ErrorCode::InvalidDomain, "image of a chart ball is not representable for d > 2");
}

std::vector<ProjHyperplane> DualDomain::pool(std::size_t m) const {
  const ProperDomain& om = *parent_;
  const ChartFrame& fr = om.frame();
  const std::size_t cd = om.dim() - 1;
  const double scale = std::max(om.chart_radius(), 1e-12);
  std::vector<ProjHyperplane> out;
  out.push_back(fr.hyperplane());
  if (out.size() >= m) return out;

  const auto& facets = om.facets();
  if (!facets.empty()) {
    const std::size_t levels = std::max<std::size_t>(2, std::min<std::size_t>(12, (m / 2) / facets.size()));
    for (std::size_t l = 0; l < levels && out.size() < m; ++l) {
      const double expo = -9.0 + 10.0 * static_cast<double>(l) / static_cast<double>(levels - 1);
      const double gap = scale * std::pow(10.0, expo);
      for (const Facet& f : facets) {
        if (out.size() >= m) break;
        out.push_back(fr.affine_hyperplane(f.normal, f.offset + gap));
      }
    }
  }
  for (std::uint64_t i = 0; out.size() < m; ++i) {
    const Vec u = sphere_direction(i, cd, mix_seed(om.seed(), 41));
    const double e = halton_point(i, 1, mix_seed(om.seed(), 43))[0];
    const double gap = scale * std::pow(10.0, -9.0 + 10.0 * e);
    out.push_back(fr.affine_hyperplane(u, om.support(u) + gap));
  }
  return out;
}

bool DualDomain::contains(const ProjHyperplane& h, std::size_t budget, double tol) const {
  const std::size_t n = std::max<std::size_t>(budget, 2);
  double sign = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec b = oriented(parent_->frame(), parent_->boundary_sample(i));
    const double v = h(b) / norm(b);
    if (std::abs(v) <= tol) return false;
    if (sign == 0.0) sign = v;
    if (v * sign < 0.0) return false;
  }
  return true;
}

namespace {

struct ChartLine {
  Vec c;
  Vec u;
  double speed = 0.0;
  double nx = 0.0;
  double nz = 0.0;
};

ChartLine chart_line(const ChartFrame& fr, std::span<const double> x, std::span<const double> z) {
  ChartLine L;
  L.nx = dot(fr.normal(), x);
  L.nz = dot(fr.normal(), z);
  const std::size_t m = fr.basis().size();
  L.c.resize(m);
  Vec dc(m);
  for (std::size_t i = 0; i < m; ++i) {
    L.c[i] = dot(fr.basis()[i], x) / L.nx;
    dc[i] = (dot(fr.basis()[i], z) - L.c[i] * L.nz) / L.nx;
  }
  L.speed = norm(dc);
  L.u = dc;
  if (L.speed > 0.0)
    for (double& e : L.u) e /= L.speed;
  return L;
}

}  // namespace

double zimmer_metric_line(const ProperDomain& omega, std::span<const double> x, std::span<const double> z,
                          double angle) {
  if (!omega.is_exact()) fail(ErrorCode::InvalidDomain, "exact metric needs a ball or polytope domain");
  if (angle == 0.0) return 0.0;
  Vec xs(x.begin(), x.end()), zs(z.begin(), z.end());
  if (dot(omega.frame().normal(), xs) < 0.0) {
    for (double& e : xs) e = -e;
    for (double& e : zs) e = -e;
  }
  const ChartLine L = chart_line(omega.frame(), xs, zs);
  if (!(L.nx > 0.0)) fail(ErrorCode::NotInDomain, "point is off the domain chart");
  const double denom = L.nx * std::cos(angle) + L.nz * std::sin(angle);
  if (!(denom > 0.0)) fail(ErrorCode::NotInDomain, "second point is off the domain chart");
  double ty = std::sin(angle) * L.speed * L.nx / denom;
  LineSection s = omega.line_section(L.c, L.u);
  if (ty < 0.0) {
    ty = -ty;
    s = {-s.t_plus, -s.t_minus};
  }
  if (!(ty < s.t_plus)) fail(ErrorCode::NotInDomain, "second point is outside the domain");
  return std::log1p(ty / (-s.t_minus)) + std::log1p(ty / (s.t_plus - ty));
}

double finsler_norm(const ProperDomain& omega, std::span<const double> x, std::span<const double> z) {
  Vec xs(x.begin(), x.end()), zs(z.begin(), z.end());
  if (dot(omega.frame().normal(), xs) < 0.0) {
    for (double& e : xs) e = -e;
    for (double& e : zs) e = -e;
  }
  const ChartLine L = chart_line(omega.frame(), xs, zs);
  const LineSection s = omega.line_section(L.c, L.u);
  return L.speed * (1.0 / (-s.t_minus) + 1.0 / s.t_plus);
}

double zimmer_metric_exact(const ProperDomain& omega, std::span<const double> x, std::span<const double> y) {
  // The chord inside the chart joins the representatives on the positive
  // side of the chart hyperplane; it may be the longer great-circle arc.
  const Vec xu = normalized(oriented(omega.frame(), x));
  const Vec yu = normalized(oriented(omega.frame(), y));
  const double angle = std::atan2(wedge_norm(xu, yu), dot(xu, yu));
  if (angle <= 1e-12) return 0.0;
  const Vec z = tangent_direction(xu, yu);
  return zimmer_metric_line(omega, xu, z, angle);
}

SampledMetric zimmer_metric_sampled(const ProperDomain& omega, std::span<const double> x, std::span<const double> y,
                                    std::size_t budget) {
  const std::size_t m = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(budget)))) + 1);
  const auto pool = DualDomain(omega).pool(m);
  double hi = -kInf, lo = kInf;
  std::size_t ihi = 0, ilo = 0;
  std::vector<double> logs(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    logs[i] = std::log(std::abs(pool[i](y) / pool[i](x)));
    if (logs[i] > hi) hi = logs[i], ihi = i;
    if (logs[i] < lo) lo = logs[i], ilo = i;
  }
  SampledMetric out;
  out.pairs = pool.size() * (pool.size() - 1);
  if (ihi != ilo) {
    out.value = hi - lo;
  } else {
    double second = -kInf;
    for (std::size_t i = 0; i < logs.size(); ++i)
      if (i != ihi) second = std::max(second, logs[i]);
    out.value = std::max(0.0, second - lo);
  }
  out.lower_bound = true;
  return out;
}

double zimmer_metric(const ProperDomain& omega, const ProjPoint& x, const ProjPoint& y, std::size_t budget) {
  if (!omega.contains(x) || !omega.contains(y)) fail(ErrorCode::NotInDomain, "metric arguments must lie in the domain");
  if (fubini_study(x, y) <= 1e-12) return 0.0;
  if (omega.is_exact()) return zimmer_metric_exact(omega, x.coords(), y.coords());
  return zimmer_metric_sampled(omega, x.coords(), y.coords(), budget).value;
}

namespace {

double pair_metric(const ProperDomain& om, const Vec& x, const Vec& y, std::size_t budget) {
  return om.is_exact() ? zimmer_metric_exact(om, x, y) : zimmer_metric_sampled(om, x, y, budget).value;
}

}  // namespace

DiameterReport diameter(const ProperDomain& outer, const std::vector<Vec>& points, std::size_t budget) {
  for (const Vec& p : points)
    if (!outer.contains(p)) fail(ErrorCode::NotNested, "sample escapes the outer domain");
  DiameterReport r;
  const std::size_t metric_budget = budget == 0 ? 10000 : budget;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      r.value = std::max(r.value, pair_metric(outer, points[i], points[j], metric_budget));
      ++r.pairs;
    }
  return r;
}

DiameterReport diameter(const ProperDomain& outer, const ProperDomain& inner, std::size_t budget) {
  const std::size_t n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::sqrt(2.0 * static_cast<double>(budget)))));
  std::vector<Vec> pts;
  for (std::size_t k = 0; k < n; ++k) pts.push_back(k % 2 == 0 ? inner.boundary_sample(k / 2) : inner.interior_sample(k / 2));
  return diameter(outer, pts, budget);
}

ContractionEstimate contraction_factor(const ProperDomain& inner, const ProperDomain& outer, std::size_t budget,
                                       double min_margin) {
  if (inner.dim() != outer.dim()) fail(ErrorCode::DimensionMismatch, "contraction domains differ in dimension");
  ContractionEstimate est;
  est.nesting_margin = kInf;
  const std::size_t nb = inner.dim() == 2 ? 2 : std::max<std::size_t>(256, budget / 16);
  for (std::size_t i = 0; i < nb; ++i) est.nesting_margin = std::min(est.nesting_margin, outer.margin(inner.boundary_sample(i)));
  if (!(est.nesting_margin > min_margin)) fail(ErrorCode::NotStrictlyNested, "inner closure is not strictly inside the outer domain");

  const bool exact = inner.is_exact() && outer.is_exact();
  const std::size_t m = inner.dim() - 1;
  double best = kInf;
  Vec best_c;
  Vec best_u;

  auto ratio_at = [&](const Vec& c, const Vec& u) {
    const Vec x = unit_lift(inner.frame(), c);
    if (!inner.contains(x)) return kInf;
    Vec lifted(inner.dim(), 0.0);
    for (std::size_t j = 0; j < m; ++j) lifted = axpy(u[j], inner.frame().basis()[j], lifted);
    const Vec z = tangent_direction(x, lifted);
    if (z.empty()) return kInf;
    return finsler_norm(inner, x, z) / finsler_norm(outer, x, z);
  };

  if (exact) {
    const std::size_t ninf = std::max<std::size_t>(1, budget / 2);
    for (std::size_t i = 0; i < ninf; ++i) {
      const Vec c = inner.frame().coordinates(inner.interior_sample(i));
      const Vec u = sphere_direction(i, m, mix_seed(inner.seed(), 53));
      const double r = ratio_at(c, u);
      ++est.pairs;
      if (r < best) best = r, best_c = c, best_u = u;
    }
    // Pattern search over base point and direction around the minimizer.
    double step = 0.05 * inner.chart_radius();
    double astep = 0.2;
    for (int it = 0; it < 60 && !best_c.empty(); ++it) {
      bool improved = false;
      for (std::size_t j = 0; j < m; ++j)
        for (double s : {step, -step}) {
          Vec c = best_c;
          c[j] += s;
          const double r = ratio_at(c, best_u);
          ++est.pairs;
          if (r < best) best = r, best_c = c, improved = true;
        }
      for (std::size_t j = 0; j < m && m > 1; ++j)
        for (double s : {astep, -astep}) {
          Vec u = best_u;
          u[j] += s;
          u = normalized(u);
          const double r = ratio_at(best_c, u);
          ++est.pairs;
          if (r < best) best = r, best_u = u, improved = true;
        }
      if (!improved) step *= 0.5, astep *= 0.5;
    }
  }

  const std::size_t nfin = exact ? budget - budget / 2 : budget;
  const std::size_t side = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(2.0 * static_cast<double>(nfin))));
  std::vector<Vec> pts;
  for (std::size_t i = 0; i < side; ++i) pts.push_back(inner.interior_sample(1000003 + i));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double c2 = pair_metric(outer, pts[i], pts[j], 10000);
      if (c2 < 1e-9) continue;
      const double c1 = pair_metric(inner, pts[i], pts[j], 10000);
      ++est.pairs;
      best = std::min(best, c1 / c2);
    }
  est.lambda = best;
  return est;
}

double rp1_contraction_lambda(double a, double b, double c, double d, int grid) {
  const double pi = std::numbers::pi;
  const double ta = rp1_angle(rp1_from_real(a));
  auto offset = [&](double t, double sign) {
    double o = sign * (rp1_angle(rp1_from_real(t)) - ta);
    o = std::fmod(o, pi);
    if (o < 0.0) o += pi;
    return o;
  };
  auto same = [](double x, double y) { return x == y || (std::isinf(x) && std::isinf(y)); };
  if (same(a, b) || same(b, c) || same(c, d)) fail(ErrorCode::BadOrder, "contraction quadruple has repeated points");
  double orient = 0.0;
  for (double sign : {1.0, -1.0}) {
    const double ob = offset(b, sign), oc = offset(c, sign), od = same(a, d) ? pi : offset(d, sign);
    if (0.0 < ob && ob < oc && oc < od) {
      orient = sign;
      break;
    }
  }
  if (orient == 0.0) fail(ErrorCode::BadOrder, "points are not in cyclic order");
  if (same(a, d)) return kInf;

  // Real coordinates in the chart whose point at infinity bisects the arc
  // from d back to a; cross-ratios are unchanged.
  const double od = offset(d, orient);
  const double inf_at = 0.5 * (od + pi);
  auto coord = [&](double t) { return -1.0 / std::tan(offset(t, orient) - inf_at); };
  const double A = -1.0 / std::tan(-inf_at);
  const double B = coord(b), C = coord(c), D = coord(d);
  const double w = C - B;

  // With x = (b + c e^s) / (1 + e^s), log[b,c;x,y] = s_y - s_x and the
  // infimum of the ratio is 1 / sup of d log[a,d;x,y] / ds.
  auto slope = [&](double s) {
    const double sig = s >= 0.0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
    const double xb = w * sig;
    const double cx = w * (s >= 0.0 ? std::exp(-s) / (1.0 + std::exp(-s)) : 1.0 / (1.0 + std::exp(s)));
    return (xb * cx / w) * ((D - A) / (((B - A) + xb) * ((D - C) + cx)));
  };
  const int n = std::max(grid, 16);
  double lo = -30.0, hi = 30.0;
  double best = -kInf, best_s = 0.0;
  for (int zoom = 0; zoom < 30; ++zoom) {
    const double h = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) {
      const double s = lo + h * i;
      const double v = slope(s);
      if (v > best) best = v, best_s = s;
    }
    lo = best_s - 2.0 * h;
    hi = best_s + 2.0 * h;
  }
  return 1.0 / best;
}

}  // namespace flagcert
