#pragma once

// Contracting G-paths: nested-image limits, shrink-rate fits, limit-set
// clouds, attracting data of single elements and equivariance checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flagcert/automaton.hpp"

namespace flagcert {

struct PathResult {
  std::string code;
  ProjPoint limit;
  /// diameters[n-1]: C_{U_{v_1}}-diameter of alpha_1 ... alpha_n U_{v_{n+1}}.
  Vec diameters;
  /// gaps[n-1]: log(sigma_k / sigma_{k+1}) of alpha_1 ... alpha_n.
  Vec gaps;
  double radius_bound = 0.0;
  std::size_t depth = 0;
  bool converged = false;
};

struct LimitOptions {
  /// Boundary samples per image for d > 2; RP^1 images use both endpoints.
  std::size_t samples = 12;
  std::size_t k = 1;
  bool diameters = true;
  bool gaps = true;
  double tolerance = 1e-9;
};

/// Needs at least depth + 1 vertices on the path; when a certificate is
/// given it must pass.
PathResult contracting_limit(const GPath& path, const GammaGraph& graph, const GroupPresentation& pres,
                             const CompatibleSystem& system, std::size_t depth, const LimitOptions& options = {},
                             const Certificate* certificate = nullptr);

/// Floor for radius bounds: rounding in depth matrix-vector products.
double radius_floor(std::size_t depth);

struct RateReport {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double r_squared = 0.0;
  std::size_t depth_min = 0;
  std::size_t depth_max = 0;
  std::size_t points = 0;
  bool accepted = false;
};

inline constexpr double kMinRSquared = 0.98;

/// Least-squares fit of log diameter against depth over depths
/// [depth_min, depth_max] of every series. lambda1 is inflated until the
/// bound lambda1 exp(-lambda2 n) dominates every point.
RateReport fit_shrink_rates(const std::vector<Vec>& diameter_series, std::size_t depth_min, std::size_t depth_max);

RateReport shrink_rates(const std::vector<GPath>& paths, const GammaGraph& graph, const GroupPresentation& pres,
                        const CompatibleSystem& system, std::size_t depth, std::size_t depth_min = 2,
                        const LimitOptions& options = {}, unsigned threads = 1);

struct CloudPoint {
  ProjPoint point;
  std::string code;
  double radius = 0.0;
};

struct LimitSetCloud {
  std::vector<CloudPoint> points;
  std::size_t depth = 0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

LimitSetCloud limit_set_sample(const GammaGraph& graph, const GroupPresentation& pres, const CompatibleSystem& system,
                               std::size_t depth, std::size_t count, std::uint64_t seed, unsigned threads = 1);

struct AttractingData {
  /// Top-k left singular span, as a point of the k-th exterior power.
  ProjPoint attracting;
  /// Covector of the span of the bottom d-k right singular directions.
  ProjHyperplane repelling;
  double gap = 0.0;
  std::size_t k = 1;
};

AttractingData attracting_data(const Matrix& m, std::size_t k = 1, double min_gap = 1e-6);

struct LocalGlobalOptions {
  std::size_t k = 1;
  std::size_t samples = 64;
  double diameter_tol = 1e-3;
  double gap_threshold = 5.0;
  double limit_tol = 1e-2;
};

struct LocalGlobalReport {
  Vec diameters;
  Vec gaps;
  bool diameters_to_zero = false;
  bool gaps_divergent = false;
  double limit_spread = 0.0;
  bool limits_consistent = false;
  bool attracting_stable = false;
  double repelling_margin = 0.0;
  /// Contraction implies divergence with a unique limit.
  bool forward_holds = false;
  /// Divergence with stable data and U off the repelling hyperplane
  /// implies contraction.
  bool backward_holds = false;
  std::string verdict;
};

LocalGlobalReport local_to_global_check(const std::vector<Matrix>& seq, const ProperDomain& U,
                                        const LocalGlobalOptions& options = {});

struct EquivarianceReport {
  Vec defects;
  Vec bounds;
  double max_defect = 0.0;
  double max_ratio = 0.0;
  std::size_t samples = 0;
  bool pass = false;
};

/// Path for s * z from a path limiting to z: drops the first letter when
/// s alpha_1 is trivial, merges it when s alpha_1 lies in T_{v_1}, and
/// otherwise prepends s through a vertex u with s in T_u and an edge
/// u -> v_1.
GPath prefix_surgery(const GPath& path, const Word& s, const GammaGraph& graph, const GroupPresentation& pres);

/// Compares the limit of the surgered path with rho(s) applied to the
/// original limit. `s_matrix` overrides rho(s) in the comparison only.
EquivarianceReport equivariance_check(const GammaGraph& graph, const GroupPresentation& pres,
                                      const CompatibleSystem& system, const Word& s, const std::vector<GPath>& paths,
                                      std::size_t depth, const std::optional<Matrix>& s_matrix = std::nullopt);

}  // namespace flagcert
