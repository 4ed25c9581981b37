#include "flagcert/projgeom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flagcert/errors.hpp"

namespace flagcert {

namespace {

constexpr double kDenominatorFloor = 1e-14;

void require_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) fail(ErrorCode::DimensionMismatch, what);
}

}  // namespace

Vec canonical_unit(std::span<const double> v) {
  const double n = norm(v);
  if (!(n > 1e-300) || !std::isfinite(n)) fail(ErrorCode::DegenerateImage, "homogeneous vector has no direction");
  Vec out(v.size());
  std::size_t arg = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = v[i] / n;
    if (std::abs(out[i]) > std::abs(out[arg])) arg = i;
  }
  if (out[arg] < 0.0)
    for (double& x : out) x = -x;
  return out;
}

ProjPoint::ProjPoint(std::span<const double> homogeneous) : coords_(canonical_unit(homogeneous)) {}
ProjPoint::ProjPoint(std::initializer_list<double> homogeneous)
    : ProjPoint(std::span<const double>(homogeneous.begin(), homogeneous.size())) {}

ProjHyperplane::ProjHyperplane(std::span<const double> covector) : covector_(canonical_unit(covector)) {}
ProjHyperplane::ProjHyperplane(std::initializer_list<double> covector)
    : ProjHyperplane(std::span<const double>(covector.begin(), covector.size())) {}

Flag::Flag(ProjPoint point, ProjHyperplane hyperplane, double incidence_tol)
    : point_(std::move(point)), hyperplane_(std::move(hyperplane)) {
  require_dim(point_.dim(), hyperplane_.dim(), "flag point and hyperplane dimensions differ");
  if (std::abs(hyperplane_(point_.coords())) > incidence_tol) {
    fail(ErrorCode::InvalidDomain, "flag point does not lie in its hyperplane");
  }
}

ProjectiveLine::ProjectiveLine(Vec first, Vec second) : first_(std::move(first)), second_(std::move(second)) {}

ProjPoint ProjectiveLine::at(double angle) const {
  Vec v(first_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::cos(angle) * first_[i] + std::sin(angle) * second_[i];
  return ProjPoint(v);
}

ProjPoint act(const Matrix& m, const ProjPoint& p) {
  require_dim(m.dim(), p.dim(), "act: matrix and point dimensions differ");
  return ProjPoint(m.apply(p.coords()));
}

ProjHyperplane act_dual(const Matrix& m, const ProjHyperplane& h) {
  require_dim(m.dim(), h.dim(), "act_dual: matrix and hyperplane dimensions differ");
  // h o m^{-1} as a covector is m^{-T} h.
  return ProjHyperplane(inverse(m).apply_transpose(h.covector()));
}

double opposition_margin(const ProjPoint& p, const ProjHyperplane& h) {
  require_dim(p.dim(), h.dim(), "opposition_margin dimensions differ");
  return std::min(1.0, std::abs(h(p.coords())));
}

bool flags_opposite(const Flag& a, const Flag& b, const GeometryTolerances& tol) {
  return opposition_margin(a.point(), b.hyperplane()) > tol.opposition &&
         opposition_margin(b.point(), a.hyperplane()) > tol.opposition;
}

ChartFrame::ChartFrame(const ProjHyperplane& h) : hyperplane_(h), normal_(h.covector()) {
  const std::size_t d = normal_.size();
  std::size_t skip = 0;
  for (std::size_t i = 0; i < d; ++i)
    if (std::abs(normal_[i]) > std::abs(normal_[skip])) skip = i;
  std::vector<Vec> done{normal_};
  for (std::size_t j = 0; j < d; ++j) {
    if (j == skip) continue;
    Vec e(d, 0.0);
    e[j] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : done) e = axpy(-dot(q, e), q, e);
    e = normalized(e);
    done.push_back(e);
    basis_.push_back(std::move(e));
  }
}

Vec ChartFrame::coordinates(std::span<const double> homogeneous, double min_margin) const {
  require_dim(homogeneous.size(), dim(), "chart coordinates dimension mismatch");
  const double h = dot(normal_, homogeneous);
  const double n = norm(homogeneous);
  if (!(std::abs(h) > min_margin * n)) fail(ErrorCode::NotInChart, "point is not opposite to the chart hyperplane");
  Vec c(basis_.size());
  for (std::size_t i = 0; i < basis_.size(); ++i) c[i] = dot(basis_[i], homogeneous) / h;
  return c;
}

Vec ChartFrame::coordinates(const ProjPoint& p, double min_margin) const { return coordinates(p.coords(), min_margin); }

Vec ChartFrame::lift(std::span<const double> coords) const {
  require_dim(coords.size(), basis_.size(), "chart lift dimension mismatch");
  Vec v = normal_;
  for (std::size_t i = 0; i < basis_.size(); ++i) v = axpy(coords[i], basis_[i], v);
  return v;
}

ProjPoint ChartFrame::point(std::span<const double> coords) const { return ProjPoint(lift(coords)); }

Vec ChartFrame::velocity(std::span<const double> x, std::span<const double> z) const {
  const double hx = dot(normal_, x);
  const double hz = dot(normal_, z);
  Vec v(basis_.size());
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    v[i] = (dot(basis_[i], z) * hx - dot(basis_[i], x) * hz) / (hx * hx);
  }
  return v;
}

ProjHyperplane ChartFrame::affine_hyperplane(std::span<const double> u, double s) const {
  require_dim(u.size(), basis_.size(), "affine hyperplane dimension mismatch");
  Vec w(dim(), 0.0);
  for (std::size_t i = 0; i < basis_.size(); ++i) w = axpy(u[i], basis_[i], w);
  w = axpy(-s, normal_, w);
  return ProjHyperplane(w);
}

Vec affine_chart(const ProjHyperplane& h, const ProjPoint& p) { return ChartFrame(h).coordinates(p); }

ProjPoint chart_point(const ProjHyperplane& h, std::span<const double> coords) { return ChartFrame(h).point(coords); }

double cross_ratio(const ProjHyperplane& w1, const ProjHyperplane& w2, const ProjPoint& z1, const ProjPoint& z2) {
  require_dim(w1.dim(), z1.dim(), "cross_ratio dimensions differ");
  require_dim(w2.dim(), z2.dim(), "cross_ratio dimensions differ");
  const double a = w1(z1.coords());
  const double b = w2(z2.coords());
  if (std::abs(a) <= kDenominatorFloor || std::abs(b) <= kDenominatorFloor) {
    fail(ErrorCode::InfiniteCrossRatio, "a point lies on a reference hyperplane");
  }
  return (w1(z2.coords()) * w2(z1.coords())) / (a * b);
}

double wedge_norm(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double w = p[i] * q[j] - p[j] * q[i];
      s += w * w;
    }
  return std::sqrt(s);
}

double fubini_study(std::span<const double> p, std::span<const double> q) {
  require_dim(p.size(), q.size(), "fubini_study dimensions differ");
  const double np = norm(p), nq = norm(q);
  const double c = std::abs(dot(p, q)) / (np * nq);
  const double s = wedge_norm(p, q) / (np * nq);
  return std::atan2(s, c);
}

double fubini_study(const ProjPoint& p, const ProjPoint& q) { return fubini_study(p.coords(), q.coords()); }

ProjectiveLine line_through(const ProjPoint& p, const ProjPoint& q) {
  require_dim(p.dim(), q.dim(), "line_through dimensions differ");
  if (fubini_study(p, q) <= 1e-10) fail(ErrorCode::CoincidentPoints, "line through coincident points");
  Vec e1 = p.coords();
  Vec e2 = tangent_direction(e1, q.coords());
  return ProjectiveLine(std::move(e1), std::move(e2));
}

ProjPoint intersect(const ProjectiveLine& line, const ProjHyperplane& h) {
  require_dim(line.dim(), h.dim(), "intersect dimensions differ");
  const double a = h(line.first());
  const double b = h(line.second());
  if (std::hypot(a, b) <= 1e-12) fail(ErrorCode::LineInHyperplane, "line is contained in the hyperplane");
  // s e1 + t e2 with s a + t b = 0.
  Vec v(line.dim());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = b * line.first()[i] - a * line.second()[i];
  return ProjPoint(v);
}

Vec geodesic_step(std::span<const double> p, std::span<const double> t, double angle) {
  Vec v(p.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::cos(angle) * p[i] + std::sin(angle) * t[i];
  return v;
}

Vec tangent_direction(std::span<const double> p, std::span<const double> v) {
  Vec t(v.begin(), v.end());
  for (int pass = 0; pass < 2; ++pass) t = axpy(-dot(p, t), p, t);
  const double n = norm(t);
  if (!(n > 1e-300)) return {};
  for (double& x : t) x /= n;
  return t;
}

double rp1_angle(const ProjPoint& p) {
  if (p.dim() != 2) fail(ErrorCode::DimensionMismatch, "rp1_angle needs d = 2");
  double a = std::atan2(p[1], p[0]);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

ProjPoint rp1_from_angle(double angle) { return ProjPoint{std::cos(angle), std::sin(angle)}; }

ProjPoint rp1_from_real(double t) {
  if (std::isinf(t)) return ProjPoint{1.0, 0.0};
  return ProjPoint{t, 1.0};
}

ProjHyperplane rp1_kernel(const ProjPoint& p) {
  if (p.dim() != 2) fail(ErrorCode::DimensionMismatch, "rp1_kernel needs d = 2");
  return ProjHyperplane{-p[1], p[0]};
}

}  // namespace flagcert
