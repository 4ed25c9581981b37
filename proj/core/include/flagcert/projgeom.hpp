#pragma once

// Projective points and hyperplanes of RP^{d-1}, affine charts, the
// cross-ratio and the Fubini-Study metric.

#include <cstddef>
#include <span>

#include "flagcert/linalg.hpp"

namespace flagcert {

struct GeometryTolerances {
  double incidence = 1e-10;
  double opposition = 1e-6;
};

/// A point of RP^{d-1}: unit representative whose largest-magnitude entry
/// is nonnegative.
class ProjPoint {
 public:
  ProjPoint() = default;
  explicit ProjPoint(std::span<const double> homogeneous);
  ProjPoint(std::initializer_list<double> homogeneous);

  std::size_t dim() const noexcept { return coords_.size(); }
  const Vec& coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

  friend bool operator==(const ProjPoint&, const ProjPoint&) = default;

 private:
  Vec coords_;
};

/// A hyperplane of RP^{d-1}, stored as its canonical unit covector.
class ProjHyperplane {
 public:
  ProjHyperplane() = default;
  explicit ProjHyperplane(std::span<const double> covector);
  ProjHyperplane(std::initializer_list<double> covector);

  std::size_t dim() const noexcept { return covector_.size(); }
  const Vec& covector() const noexcept { return covector_; }
  double operator()(std::span<const double> v) const { return dot(covector_, v); }

  friend bool operator==(const ProjHyperplane&, const ProjHyperplane&) = default;

 private:
  Vec covector_;
};

/// Point contained in a hyperplane: a (1, d-1) flag.
class Flag {
 public:
  Flag(ProjPoint point, ProjHyperplane hyperplane, double incidence_tol = 1e-10);

  const ProjPoint& point() const noexcept { return point_; }
  const ProjHyperplane& hyperplane() const noexcept { return hyperplane_; }

 private:
  ProjPoint point_;
  ProjHyperplane hyperplane_;
};

class ProjectiveLine {
 public:
  ProjectiveLine(Vec first, Vec second);

  std::size_t dim() const noexcept { return first_.size(); }
  const Vec& first() const noexcept { return first_; }
  const Vec& second() const noexcept { return second_; }

  /// Point cos(t) * first + sin(t) * second.
  ProjPoint at(double angle) const;

 private:
  Vec first_;
  Vec second_;
};

/// Canonicalizes a homogeneous vector: unit norm, largest-magnitude entry
/// nonnegative.
Vec canonical_unit(std::span<const double> v);

ProjPoint act(const Matrix& m, const ProjPoint& p);
ProjHyperplane act_dual(const Matrix& m, const ProjHyperplane& h);

double opposition_margin(const ProjPoint& p, const ProjHyperplane& h);
bool flags_opposite(const Flag& a, const Flag& b, const GeometryTolerances& tol = {});

/// Orthonormal frame attached to a hyperplane: the normal covector and a
/// completion by Gram-Schmidt on the standard basis, skipping the basis
/// vector most aligned with the normal.
class ChartFrame {
 public:
  ChartFrame() = default;
  explicit ChartFrame(const ProjHyperplane& h);

  std::size_t dim() const noexcept { return normal_.size(); }
  const ProjHyperplane& hyperplane() const noexcept { return hyperplane_; }
  const Vec& normal() const noexcept { return normal_; }
  const std::vector<Vec>& basis() const noexcept { return basis_; }

  /// Chart coordinates (length d-1) of a point opposite to the hyperplane.
  Vec coordinates(std::span<const double> homogeneous, double min_margin = 1e-12) const;
  Vec coordinates(const ProjPoint& p, double min_margin = 1e-12) const;

  /// Lift n + sum c_i b_i of chart coordinates.
  Vec lift(std::span<const double> coords) const;
  ProjPoint point(std::span<const double> coords) const;

  /// Chart-coordinate velocity of the curve cos(t) x + sin(t) z at t = 0,
  /// for unit x in the chart and unit z orthogonal to x.
  Vec velocity(std::span<const double> x, std::span<const double> z) const;

  /// Covector of the chart-affine hyperplane {c : <u, c> = s}.
  ProjHyperplane affine_hyperplane(std::span<const double> u, double s) const;

 private:
  ProjHyperplane hyperplane_;
  Vec normal_;
  std::vector<Vec> basis_;
};

Vec affine_chart(const ProjHyperplane& h, const ProjPoint& p);
ProjPoint chart_point(const ProjHyperplane& h, std::span<const double> coords);

/// [w1, w2; z1, z2] = w1(z2) w2(z1) / (w1(z1) w2(z2)).
double cross_ratio(const ProjHyperplane& w1, const ProjHyperplane& w2, const ProjPoint& z1, const ProjPoint& z2);

ProjectiveLine line_through(const ProjPoint& p, const ProjPoint& q);
ProjPoint intersect(const ProjectiveLine& line, const ProjHyperplane& h);

/// Norm of p ^ q for unit p, q: the sine of the Fubini-Study distance.
double wedge_norm(std::span<const double> p, std::span<const double> q);

double fubini_study(const ProjPoint& p, const ProjPoint& q);
double fubini_study(std::span<const double> p, std::span<const double> q);

/// Point at Fubini-Study distance `angle` from unit p in unit tangent
/// direction t (t orthogonal to p).
Vec geodesic_step(std::span<const double> p, std::span<const double> t, double angle);

/// Component of v orthogonal to unit p, normalized; empty when v is
/// parallel to p.
Vec tangent_direction(std::span<const double> p, std::span<const double> v);

// RP^1 helpers: angle coordinate in [0, pi) for d = 2.
double rp1_angle(const ProjPoint& p);
ProjPoint rp1_from_angle(double angle);
/// Point [t : 1], or [1 : 0] for infinite t.
ProjPoint rp1_from_real(double t);
/// Covector whose kernel is the given RP^1 point.
ProjHyperplane rp1_kernel(const ProjPoint& p);

}  // namespace flagcert
