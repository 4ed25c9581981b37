#include "flagcert/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "flagcert/errors.hpp"
#include "parallel.hpp"

namespace flagcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Two unit vectors and their wedge (as an antisymmetric matrix), each with
// a log scale, pushed through a product right to left. The wedge keeps the
// sine of the angle between the images accurate after the vectors
// themselves have become indistinguishable in double precision.
struct Track {
  Vec x, y;
  Matrix b;
  double lx = 0.0, ly = 0.0, lb = 0.0;
};

void renorm(Vec& v, double& scale) {
  const double n = norm(v);
  for (double& e : v) e /= n;
  scale += std::log(n);
}

Track make_track(std::span<const double> p, std::span<const double> q) {
  Track t;
  t.x.assign(p.begin(), p.end());
  t.y.assign(q.begin(), q.end());
  renorm(t.x, t.lx);
  renorm(t.y, t.ly);
  const std::size_t d = t.x.size();
  t.b = Matrix(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) t.b(i, j) = t.x[i] * t.y[j] - t.y[i] * t.x[j];
  const double s = t.b.max_abs();
  if (s > 0.0) {
    t.b *= 1.0 / s;
    t.lb = std::log(s);
  }
  return t;
}

void apply(Track& t, const Matrix& m) {
  t.x = m.apply(t.x);
  t.y = m.apply(t.y);
  renorm(t.x, t.lx);
  renorm(t.y, t.ly);
  t.b = m * t.b * m.transpose();
  const double s = t.b.max_abs();
  if (s > 0.0) {
    t.b *= 1.0 / s;
    t.lb += std::log(s);
  }
}

// Angle between the tracked images, with the unit direction z such that
// y ~ cos(a) x + sin(a) z.
double track_angle(const Track& t, Vec* z) {
  const std::size_t d = t.x.size();
  double fro = 0.0;
  for (double e : t.b.data()) fro += e * e;
  const double s = std::sqrt(0.5 * fro) * std::exp(t.lb - t.lx - t.ly);
  const double c = dot(t.x, t.y);
  const double angle = std::atan2(s, std::abs(c));
  if (z != nullptr) {
    Vec w(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) w[j] += t.x[i] * t.b(i, j);
    if (c < 0.0)
      for (double& e : w) e = -e;
    const double n = norm(w);
    if (n > 0.0)
      for (double& e : w) e /= n;
    *z = std::move(w);
  }
  return angle;
}

Vec push_through(const std::vector<Matrix>& elems, std::size_t n, std::span<const double> p) {
  Vec v(p.begin(), p.end());
  double scale = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    v = elems[i].apply(v);
    renorm(v, scale);
  }
  return v;
}

std::vector<Vec> image_samples(const ProperDomain& u, const LimitOptions& options) {
  std::vector<Vec> pts;
  const std::size_t n = u.dim() == 2 ? 2 * std::max<std::size_t>(1, u.balls().size()) : options.samples;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(u.boundary_sample(i));
  return pts;
}

// log of the largest singular value of each exterior power 0..d of the
// prefix products, updated one factor at a time.
class PowerNorms {
 public:
  PowerNorms(std::size_t d, std::size_t k) : d_(d), k_(k) {
    for (std::size_t j = k - 1; j <= k + 1; ++j) {
      if (j == 0 || j == d) continue;
      orders_.push_back(j);
      prods_.push_back(Matrix::identity(binomial(d, j)));
      scales_.push_back(0.0);
    }
  }

  double step(const Matrix& m) {
    log_det_ += std::log(std::abs(determinant(m)));
    for (std::size_t i = 0; i < orders_.size(); ++i) {
      prods_[i] = prods_[i] * (orders_[i] == 1 ? m : exterior_power(m, orders_[i]));
      const double s = prods_[i].max_abs();
      prods_[i] *= 1.0 / s;
      scales_[i] += std::log(s);
    }
    auto L = [&](std::size_t j) {
      if (j == 0) return 0.0;
      if (j == d_) return log_det_;
      for (std::size_t i = 0; i < orders_.size(); ++i)
        if (orders_[i] == j) return scales_[i] + std::log(svd(prods_[i], {100, true}).sigma[0]);
      return 0.0;
    };
    return 2.0 * L(k_) - L(k_ - 1) - L(k_ + 1);
  }

 private:
  std::size_t d_, k_;
  std::vector<std::size_t> orders_;
  std::vector<Matrix> prods_;
  std::vector<double> scales_;
  double log_det_ = 0.0;
};

}  // namespace

double radius_floor(std::size_t depth) {
  return 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<std::size_t>(depth, 1));
}

PathResult contracting_limit(const GPath& path, const GammaGraph& graph, const GroupPresentation& pres,
                             const CompatibleSystem& system, std::size_t depth, const LimitOptions& options,
                             const Certificate* certificate) {
  if (certificate != nullptr && !certificate->pass) fail(ErrorCode::NotCertified, "system does not carry a passing certificate");
  if (depth < 1 || path.size() < depth + 1) fail(ErrorCode::InsufficientData, "path is shorter than depth + 1");
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto& s = graph.successors(path.vertices[i]);
    if (std::find(s.begin(), s.end(), path.vertices[i + 1]) == s.end())
      fail(ErrorCode::NotCertified, "path uses an edge outside the certified graph");
  }
  const std::size_t d = pres.dim();
  if (options.gaps && (options.k < 1 || options.k >= d)) fail(ErrorCode::BadDegree, "gap index out of range");

  std::vector<Matrix> elems;
  for (std::size_t i = 0; i < depth; ++i) {
    Matrix m = pres.evaluate(path_element(graph, path, i));
    m *= 1.0 / m.max_abs();
    elems.push_back(std::move(m));
  }

  PathResult r;
  r.code = path.code;
  r.depth = depth;
  const ProperDomain& u1 = system.domain(path.vertices[0]);

  if (options.gaps) {
    PowerNorms pn(d, options.k);
    for (std::size_t n = 0; n < depth; ++n) r.gaps.push_back(pn.step(elems[n]));
  }

  if (options.diameters) {
    for (std::size_t n = 1; n <= depth; ++n) {
      const std::vector<Vec> pts = image_samples(system.domain(path.vertices[n]), options);
      double diam = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
          Track t = make_track(pts[i], pts[j]);
          for (std::size_t m = n; m-- > 0;) apply(t, elems[m]);
          Vec z;
          const double a = track_angle(t, &z);
          if (a > 0.0) diam = std::max(diam, zimmer_metric_line(u1, t.x, z, a));
        }
      r.diameters.push_back(diam);
    }
  }

  const ProperDomain& last = system.domain(path.vertices[depth]);
  const Vec c = last.center_point();
  r.limit = ProjPoint(push_through(elems, depth, c));
  double radius = 0.0;
  for (const Vec& b : image_samples(last, options)) {
    Track t = make_track(c, b);
    for (std::size_t m = depth; m-- > 0;) apply(t, elems[m]);
    radius = std::max(radius, track_angle(t, nullptr));
  }
  r.radius_bound = std::max(radius, radius_floor(depth));
  r.converged = r.radius_bound < options.tolerance;
  return r;
}

RateReport fit_shrink_rates(const std::vector<Vec>& diameter_series, std::size_t depth_min, std::size_t depth_max) {
  std::vector<double> xs, ys;
  std::vector<bool> seen(depth_max + 1, false);
  for (const Vec& s : diameter_series)
    for (std::size_t n = std::max<std::size_t>(depth_min, 1); n <= depth_max && n <= s.size(); ++n) {
      const double v = s[n - 1];
      if (!(v > 0.0) || !std::isfinite(v)) continue;
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(v));
      seen[n] = true;
    }
  if (std::count(seen.begin(), seen.end(), true) < 5) fail(ErrorCode::InsufficientData, "rate fit needs at least 5 depths");
  const double N = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / N;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / N;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0, lift = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double res = ys[i] - (intercept + slope * xs[i]);
    ssr += res * res;
    lift = std::max(lift, res);
  }
  RateReport rep;
  rep.lambda2 = -slope;
  rep.lambda1 = std::exp(intercept + lift);
  rep.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 0.0;
  rep.depth_min = depth_min;
  rep.depth_max = depth_max;
  rep.points = xs.size();
  rep.accepted = rep.r_squared >= kMinRSquared && rep.lambda2 > 0.0;
  return rep;
}

RateReport shrink_rates(const std::vector<GPath>& paths, const GammaGraph& graph, const GroupPresentation& pres,
                        const CompatibleSystem& system, std::size_t depth, std::size_t depth_min,
                        const LimitOptions& options, unsigned threads) {
  LimitOptions opt = options;
  opt.diameters = true;
  opt.gaps = false;
  std::vector<Vec> series(paths.size());
  detail::parallel_for(paths.size(), threads, [&](std::size_t i) {
    series[i] = contracting_limit(paths[i], graph, pres, system, depth, opt).diameters;
  });
  return fit_shrink_rates(series, depth_min, depth);
}

LimitSetCloud limit_set_sample(const GammaGraph& graph, const GroupPresentation& pres, const CompatibleSystem& system,
                               std::size_t depth, std::size_t count, std::uint64_t seed, unsigned threads) {
  PathOptions po;
  po.strategy = PathStrategy::Random;
  po.count = count;
  po.seed = seed;
  const PathEnumeration paths = enumerate_paths(graph, depth + 1, po);
  LimitOptions opt;
  opt.diameters = false;
  opt.gaps = false;
  LimitSetCloud cloud;
  cloud.depth = depth;
  cloud.count = count;
  cloud.seed = seed;
  cloud.points.resize(paths.paths.size());
  detail::parallel_for(paths.paths.size(), threads, [&](std::size_t i) {
    const PathResult r = contracting_limit(paths.paths[i], graph, pres, system, depth, opt);
    cloud.points[i] = {r.limit, r.code, r.radius_bound};
  });
  std::stable_sort(cloud.points.begin(), cloud.points.end(),
                   [](const CloudPoint& a, const CloudPoint& b) { return a.code < b.code; });
  return cloud;
}

AttractingData attracting_data(const Matrix& m, std::size_t k, double min_gap) {
  const std::size_t d = m.dim();
  if (k < 1 || k >= d) fail(ErrorCode::BadDegree, "attracting data needs 1 <= k <= d-1");
  const SingularDecomposition s = svd(m);
  AttractingData a;
  a.k = k;
  a.gap = std::log(s.sigma[k - 1] / s.sigma[k]);
  if (!(a.gap > min_gap)) fail(ErrorCode::GapTooSmall, "singular value gap is below the threshold");
  std::vector<Vec> us, vs;
  for (std::size_t i = 0; i < k; ++i) {
    us.push_back(s.u.column(i));
    vs.push_back(s.v.column(i));
  }
  a.attracting = ProjPoint(k == 1 ? us.front() : wedge(us));
  a.repelling = ProjHyperplane(k == 1 ? vs.front() : wedge(vs));
  return a;
}

LocalGlobalReport local_to_global_check(const std::vector<Matrix>& seq, const ProperDomain& U,
                                        const LocalGlobalOptions& options) {
  if (seq.empty()) fail(ErrorCode::InsufficientData, "local-to-global check needs a nonempty sequence");
  LocalGlobalReport rep;
  std::vector<Vec> pts{U.center_point()};
  for (std::size_t i = 0; i < options.samples; ++i) pts.push_back(U.boundary_sample(i));

  std::vector<ProjPoint> limits;
  for (const Matrix& g : seq) {
    std::vector<Vec> img;
    for (const Vec& p : pts) img.push_back(normalized(g.apply(p)));
    double diam = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i)
      for (std::size_t j = i + 1; j < img.size(); ++j) diam = std::max(diam, fubini_study(img[i], img[j]));
    rep.diameters.push_back(diam);
    limits.emplace_back(img.front());
  }
  rep.gaps = gap_trace(seq, options.k, options.gap_threshold).values;
  rep.gaps_divergent = flag_divergent(rep.gaps, options.gap_threshold);

  const std::size_t n = seq.size();
  const std::size_t start = n - std::max<std::size_t>(1, n / 4);
  const std::size_t mid = start + (n - start) / 2;
  double early = kInf;
  for (std::size_t i = start; i < std::max(mid, start + 1); ++i) early = std::min(early, rep.diameters[i]);
  rep.diameters_to_zero = rep.diameters.back() < options.diameter_tol && rep.diameters.back() <= early;

  for (std::size_t i = start; i < n; ++i) rep.limit_spread = std::max(rep.limit_spread, fubini_study(limits[i], limits.back()));
  rep.limits_consistent = rep.limit_spread <= options.limit_tol;

  if (rep.gaps.back() > options.gap_threshold) {
    const AttractingData fin = attracting_data(seq.back(), options.k);
    double spread = 0.0;
    bool ok = true;
    for (std::size_t i = start; i < n && ok; ++i) {
      if (!(rep.gaps[i] > 1e-6)) {
        ok = false;
        break;
      }
      const AttractingData a = attracting_data(seq[i], options.k);
      spread = std::max(spread, fubini_study(a.attracting.coords(), fin.attracting.coords()));
    }
    rep.attracting_stable = ok && spread <= options.limit_tol;
    if (options.k == 1) {
      rep.repelling_margin = 1.0;
      for (const Vec& p : pts) rep.repelling_margin = std::min(rep.repelling_margin, opposition_margin(ProjPoint(p), fin.repelling));
    }
  }

  rep.forward_holds = !rep.diameters_to_zero || (rep.gaps_divergent && rep.limits_consistent);
  rep.backward_holds = !(rep.gaps_divergent && rep.attracting_stable && rep.repelling_margin > 1e-6) || rep.diameters_to_zero;
  if (rep.gaps_divergent && rep.diameters_to_zero)
    rep.verdict = "P-divergent and contracting";
  else if (!rep.gaps_divergent && !rep.diameters_to_zero)
    rep.verdict = "not P-divergent";
  else
    rep.verdict = "inconclusive";
  return rep;
}

GPath prefix_surgery(const GPath& path, const Word& s, const GammaGraph& graph, const GroupPresentation& pres) {
  if (path.size() < 2) fail(ErrorCode::PathNotFound, "prefix surgery needs a path of length >= 2");
  const std::string id_key = pres.element_key(Word{});
  const Word sa = concat(s, path_element(graph, path, 0));
  const std::string sa_key = pres.element_key(sa);
  GPath out;
  if (sa_key == id_key) {
    out.vertices.assign(path.vertices.begin() + 1, path.vertices.end());
    out.element_indices.assign(path.element_indices.begin() + 1, path.element_indices.end());
  } else {
    const std::size_t v1 = path.vertices[0];
    const auto& e1 = graph.elements(v1);
    for (std::size_t i = 0; i < e1.size() && out.vertices.empty(); ++i) {
      if (pres.element_key(e1[i]) == sa_key) {
        out = path;
        out.element_indices[0] = i;
      }
    }
    const std::string s_key = pres.element_key(s);
    for (std::size_t u = 0; u < graph.size() && out.vertices.empty(); ++u) {
      const auto& succ = graph.successors(u);
      if (std::find(succ.begin(), succ.end(), v1) == succ.end()) continue;
      const auto& eu = graph.elements(u);
      for (std::size_t i = 0; i < eu.size(); ++i) {
        if (pres.element_key(eu[i]) != s_key) continue;
        out.vertices.push_back(u);
        out.element_indices.push_back(i);
        out.vertices.insert(out.vertices.end(), path.vertices.begin(), path.vertices.end());
        out.element_indices.insert(out.element_indices.end(), path.element_indices.begin(), path.element_indices.end());
        break;
      }
    }
  }
  if (out.vertices.empty()) fail(ErrorCode::PathNotFound, "no prefix surgery realizes the translated path");
  out.code = path_code(graph, out.vertices, out.element_indices);
  return out;
}

EquivarianceReport equivariance_check(const GammaGraph& graph, const GroupPresentation& pres,
                                      const CompatibleSystem& system, const Word& s, const std::vector<GPath>& paths,
                                      std::size_t depth, const std::optional<Matrix>& s_matrix) {
  const Matrix sm = s_matrix ? *s_matrix : pres.evaluate(s);
  const SingularDecomposition sv = svd(sm);
  const double lip = sv.sigma.front() / sv.sigma.back();
  LimitOptions opt;
  opt.diameters = false;
  opt.gaps = false;
  EquivarianceReport rep;
  rep.pass = true;
  for (const GPath& p : paths) {
    const GPath q = prefix_surgery(p, s, graph, pres);
    const PathResult a = contracting_limit(p, graph, pres, system, depth, opt);
    const PathResult b = contracting_limit(q, graph, pres, system, depth, opt);
    const double defect = fubini_study(act(sm, a.limit), b.limit);
    const double bound = lip * a.radius_bound + b.radius_bound;
    rep.defects.push_back(defect);
    rep.bounds.push_back(bound);
    rep.max_defect = std::max(rep.max_defect, defect);
    rep.max_ratio = std::max(rep.max_ratio, defect / bound);
    rep.pass = rep.pass && defect <= bound;
    ++rep.samples;
  }
  return rep;
}

}  // namespace flagcert
