#pragma once

// Proper domains of RP^{d-1}, their duals, the cross-ratio metric C_Omega
// and contraction estimates between nested domains.

#include <cstdint>
#include <span>
#include <vector>

#include "flagcert/projgeom.hpp"

namespace flagcert {

enum class DomainKind { ChartBall, ConvexPolytope, SampledSet };

struct ChartBallSpec {
  Vec center;
  double radius = 0.0;
};

/// Chart half-space <normal, c> <= offset with unit normal.
struct Facet {
  Vec normal;
  double offset = 0.0;
};

/// Parameters t_minus < 0 < t_plus where the chart line c + t u leaves
/// the domain.
struct LineSection {
  double t_minus = 0.0;
  double t_plus = 0.0;
};

class ProperDomain {
 public:
  static ProperDomain chart_ball(const ProjHyperplane& chart, Vec center, double radius, std::uint64_t seed = 0);
  /// Fubini-Study ball: the chart ball of radius tan(r) about the origin of
  /// the chart whose normal is `center`. In RP^1 this is an arc.
  static ProperDomain fs_ball(const ProjPoint& center, double radius, std::uint64_t seed = 0);
  static ProperDomain polytope(const ProjHyperplane& chart, std::vector<Vec> vertices, std::uint64_t seed = 0);
  static ProperDomain ball_union(const ProjHyperplane& chart, std::vector<ChartBallSpec> balls, std::uint64_t seed = 0);
  /// Interval (lo, hi) in the standard chart [t : 1] of RP^1.
  static ProperDomain rp1_interval(double lo, double hi, std::uint64_t seed = 0);

  DomainKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return frame_.dim(); }
  const ChartFrame& frame() const noexcept { return frame_; }
  const std::vector<ChartBallSpec>& balls() const noexcept { return balls_; }
  const std::vector<Vec>& vertices() const noexcept { return vertices_; }
  const std::vector<Facet>& facets() const noexcept { return facets_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Ball and polytope kinds admit the exact line-section metric.
  bool is_exact() const noexcept { return kind_ != DomainKind::SampledSet; }

  bool contains(std::span<const double> x) const;
  bool contains(const ProjPoint& p) const { return contains(p.coords()); }

  /// Signed Fubini-Study distance to the boundary, positive inside. Exact
  /// in RP^1, for Fubini-Study balls and for polytopes from inside; other
  /// cases minimize over a cached boundary sample with local refinement.
  double margin(std::span<const double> x) const;

  Vec boundary_sample(std::uint64_t index) const;
  Vec interior_sample(std::uint64_t index) const;

  /// Moves a boundary point a Fubini-Study distance `eps` along the lifted
  /// chart outward normal.
  Vec push_outward(std::span<const double> boundary_point, double eps) const;

  /// Points of the closed eps-neighborhood: pushed boundary samples at
  /// distances eps and eps/2, raw boundary samples and interior samples.
  std::vector<Vec> neighborhood_samples(double eps, std::size_t budget) const;

  /// Smallest opposition margin of a boundary sample against the chart.
  double closure_margin(std::size_t budget = 256) const;

  /// Max over the closure of <u, c> in chart coordinates.
  double support(std::span<const double> u) const;
  /// Centroid or ball center, as chart coordinates.
  Vec chart_center() const;
  Vec center_point() const { return frame_.lift(chart_center()); }
  /// Largest chart distance from the center to the closure.
  double chart_radius() const;

  /// Section of the chart line through c in unit direction u. Exact kinds
  /// only; c must be inside.
  LineSection line_section(std::span<const double> c, std::span<const double> u) const;

  /// Image under g. Exact for polytopes and for RP^1 balls.
  ProperDomain transformed(const Matrix& g) const;

 private:
  ProperDomain() = default;
  void finish();
  Vec union_boundary_point(std::uint64_t index, bool& ok) const;
  double sampled_margin(std::span<const double> x, bool inside) const;

  DomainKind kind_ = DomainKind::ChartBall;
  ChartFrame frame_;
  std::vector<ChartBallSpec> balls_;
  std::vector<Vec> vertices_;
  std::vector<Facet> facets_;
  std::vector<std::vector<std::size_t>> facet_vertices_;
  std::uint64_t seed_ = 0;
  // RP^1: lifted endpoints of the merged chart intervals.
  std::vector<Vec> endpoints_;
  // d > 2, non-FS-ball kinds: boundary cache for margins.
  std::vector<Vec> boundary_cache_;
  bool fs_ball_ = false;
};

/// Hyperplanes opposite to every point of the closure of a domain.
class DualDomain {
 public:
  explicit DualDomain(const ProperDomain& parent) : parent_(&parent) {}

  const ProperDomain& parent() const noexcept { return *parent_; }

  /// Deterministic pool of m hyperplanes: the chart hyperplane, facet
  /// hyperplanes pushed out by log-spaced gaps, then random supporting
  /// hyperplanes.
  std::vector<ProjHyperplane> pool(std::size_t m) const;

  /// Opposition check against sampled closure points.
  bool contains(const ProjHyperplane& h, std::size_t budget = 256, double tol = 1e-12) const;

 private:
  const ProperDomain* parent_;
};

struct SampledMetric {
  double value = 0.0;
  std::size_t pairs = 0;
  bool lower_bound = true;
};

/// C_Omega(x, y): exact line-section value for exact kinds, sampled dual
/// supremum (a lower bound) otherwise.
double zimmer_metric(const ProperDomain& omega, const ProjPoint& x, const ProjPoint& y, std::size_t budget = 10000);

double zimmer_metric_exact(const ProperDomain& omega, std::span<const double> x, std::span<const double> y);

/// Exact C_Omega between x and cos(a) x + sin(a) z, for unit x and unit z
/// orthogonal to x. Keeps full relative precision for tiny angles.
double zimmer_metric_line(const ProperDomain& omega, std::span<const double> x, std::span<const double> z,
                          double angle);

/// Derivative of zimmer_metric_line in the angle at 0.
double finsler_norm(const ProperDomain& omega, std::span<const double> x, std::span<const double> z);

SampledMetric zimmer_metric_sampled(const ProperDomain& omega, std::span<const double> x, std::span<const double> y,
                                    std::size_t budget);

struct DiameterReport {
  double value = 0.0;
  std::size_t pairs = 0;
};

DiameterReport diameter(const ProperDomain& outer, const ProperDomain& inner, std::size_t budget);
DiameterReport diameter(const ProperDomain& outer, const std::vector<Vec>& points, std::size_t budget = 0);

struct ContractionEstimate {
  double lambda = 0.0;
  std::size_t pairs = 0;
  double nesting_margin = 0.0;
};

/// inf C_{Omega1} / C_{Omega2} over sampled pairs of Omega1, half of them
/// infinitesimal (Finsler ratios), refined locally around the minimizer.
ContractionEstimate contraction_factor(const ProperDomain& inner, const ProperDomain& outer, std::size_t budget,
                                       double min_margin = 1e-3);

/// inf over distinct x, y in (b, c) of |log[b,c;x,y]| / |log[a,d;x,y]| for
/// cyclically ordered a, b, c, d in RP^1 (infinite values allowed). Returns
/// +infinity when a == d.
double rp1_contraction_lambda(double a, double b, double c, double d, int grid = 2048);

}  // namespace flagcert
