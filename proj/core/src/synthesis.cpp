#include "flagcert/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "flagcert/errors.hpp"

namespace flagcert {

namespace {

constexpr double kPi = std::numbers::pi;

Vec unit_at(double a) { return {std::cos(a), std::sin(a)}; }

[[noreturn]] void synthesis_failed(const std::string& clause, double angle) {
  std::ostringstream os;
  os.precision(17);
  os << clause << " at boundary point [" << std::cos(angle) << " : " << std::sin(angle) << "]";
  fail(ErrorCode::SynthesisFailed, os.str());
}

struct Element {
  Word word;
  Matrix m;
  Matrix inv;
};

// Distinct nonidentity elements of word length <= radius, by length then
// lexicographically (letter order g1, g1^-1, g2, g2^-1, ...).
std::vector<Element> ball_elements(const GroupPresentation& pres, std::size_t radius) {
  std::vector<int> alphabet;
  for (std::size_t i = 0; i < pres.generators().size(); ++i) {
    alphabet.push_back(static_cast<int>(i) + 1);
    alphabet.push_back(-static_cast<int>(i) - 1);
  }
  std::set<std::string> seen{pres.element_key(Word{})};
  std::vector<Element> out;
  std::vector<Word> layer{Word{}};
  for (std::size_t len = 1; len <= radius; ++len) {
    std::vector<Word> next;
    for (const Word& w : layer)
      for (int l : alphabet) {
        if (!w.empty() && w.letters.back() == -l) continue;
        Word x = w;
        x.letters.push_back(l);
        if (!seen.insert(pres.element_key(x)).second) continue;
        const Matrix m = pres.evaluate(x);
        out.push_back({x, m, inverse(m)});
        next.push_back(std::move(x));
      }
    layer = std::move(next);
  }
  return out;
}

struct PeripheralFrame {
  std::size_t peripheral = 0;
  int letter = 0;
  Matrix t;
  Vec fixed;
  Vec normal;
  double tau = 0.0;
  Arc k;
};

PeripheralFrame peripheral_frame(const GroupPresentation& pres, std::size_t index) {
  const Peripheral& per = pres.peripherals()[index];
  if (per.generators.size() != 1) fail(ErrorCode::SynthesisFailed, "peripheral " + per.name + " must be cyclic in RP^1");
  PeripheralFrame f;
  f.peripheral = index;
  f.letter = static_cast<int>(per.generators[0]) + 1;
  f.t = pres.letter(f.letter);
  const Matrix& t = f.t;
  const double tr = t(0, 0) + t(1, 1);
  const double det = determinant(t);
  const double disc = tr * tr - 4.0 * det;
  const double scale = std::max(std::abs(tr * tr), std::abs(det));
  if (std::abs(disc) > 1e-9 * scale) fail(ErrorCode::SynthesisFailed, "peripheral " + per.name + " is not parabolic");
  const double lambda = 0.5 * tr;
  // Fixed point: kernel of t - lambda I.
  const double a = t(0, 0) - lambda, b = t(0, 1), c = t(1, 0), d = t(1, 1) - lambda;
  Vec p = std::abs(a) + std::abs(b) >= std::abs(c) + std::abs(d) ? Vec{-b, a} : Vec{-d, c};
  if (norm(p) < 1e-12) fail(ErrorCode::SynthesisFailed, "peripheral " + per.name + " acts trivially");
  f.fixed = normalized(p);
  f.normal = {-f.fixed[1], f.fixed[0]};
  // t(x p + n) = (x + tau) p + n up to scale.
  const Vec image = t.apply(f.normal);
  f.tau = dot(image, f.fixed) / dot(image, f.normal);
  const double h = 0.5 * std::abs(f.tau);
  auto chart = [&](double x) { return axpy(x, f.fixed, f.normal); };
  const double lo = angle_of(chart(-h));
  const double hi = angle_of(chart(h));
  const double mid = angle_of(f.normal);
  const Arc c1{lo, wrap_angle(hi - lo)};
  f.k = wrap_angle(mid - lo) <= c1.width ? c1 : Arc{hi, wrap_angle(lo - hi)};
  return f;
}

// Merged complement of a family of arcs in [0, pi); empty arcs family
// leaves the whole circle.
std::vector<Arc> uncovered(const std::vector<Arc>& arcs) {
  if (arcs.empty()) return {Arc{0.0, kPi}};
  std::vector<std::pair<double, double>> iv;
  for (const Arc& a : arcs) {
    const double lo = wrap_angle(a.lo);
    const double hi = lo + a.width;
    if (hi <= kPi) {
      iv.emplace_back(lo, hi);
    } else {
      iv.emplace_back(lo, kPi);
      iv.emplace_back(0.0, hi - kPi);
    }
  }
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& [lo, hi] : iv) {
    if (!merged.empty() && lo <= merged.back().second)
      merged.back().second = std::max(merged.back().second, hi);
    else
      merged.emplace_back(lo, hi);
  }
  std::vector<Arc> gaps;
  for (std::size_t i = 0; i + 1 < merged.size(); ++i)
    if (merged[i + 1].first > merged[i].second) gaps.push_back({merged[i].second, merged[i + 1].first - merged[i].second});
  const double tail = kPi - merged.back().second + merged.front().first;
  if (tail > 0.0) gaps.push_back({merged.back().second, tail});
  return gaps;
}

}  // namespace

double wrap_angle(double a) {
  a = std::fmod(a, kPi);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

double angle_of(std::span<const double> v) { return wrap_angle(std::atan2(v[1], v[0])); }

Arc arc_image(const Matrix& m, const Arc& a) {
  const double x = angle_of(m.apply(unit_at(a.lo)));
  const double y = angle_of(m.apply(unit_at(a.lo + a.width)));
  const double c = angle_of(m.apply(unit_at(a.center())));
  const Arc first{x, wrap_angle(y - x)};
  if (wrap_angle(c - x) <= first.width) return first;
  return {y, wrap_angle(x - y)};
}

Arc widen(const Arc& a, double by) { return {wrap_angle(a.lo - by), a.width + 2.0 * by}; }

bool arc_contains(const Arc& outer, const Arc& inner, double margin) {
  if (inner.width + 2.0 * margin >= outer.width) return false;
  const double off = wrap_angle(inner.lo - outer.lo);
  return off >= margin && off + inner.width <= outer.width - margin;
}

bool arcs_meet(const Arc& a, const Arc& b) {
  return wrap_angle(a.lo - b.lo) <= b.width || wrap_angle(b.lo - a.lo) <= a.width;
}

ProperDomain arc_domain(const Arc& a, std::uint64_t seed) {
  return ProperDomain::fs_ball(ProjPoint(unit_at(a.center())), 0.5 * a.width, seed);
}

SynthesisResult synthesize_rp1(const GroupPresentation& pres, const SynthesisParams& params) {
  if (pres.dim() != 2) fail(ErrorCode::SynthesisFailed, "synthesis is restricted to actions on RP^1");
  if (pres.generators().empty()) fail(ErrorCode::SynthesisFailed, "no generators: no expansion is available");
  if (!(params.epsilon > 0.0) || !(params.cover_radius > 0.0) || params.domain_radius <= params.cover_radius ||
      !(params.parabolic_radius > 0.0) || params.parabolic_radius >= kPi / 2 || params.domain_radius >= kPi / 2)
    fail(ErrorCode::SynthesisFailed, "synthesis parameters out of range");

  const std::vector<Element> ball = ball_elements(pres, params.search_radius);
  const double eps = params.epsilon;
  const double r = params.domain_radius;
  const double v = params.cover_radius;
  std::vector<SynthesizedVertex> verts;

  // Cusps: g p for the parabolic fixed point p of each peripheral and g of
  // length <= cusp_depth, with the shortest-lex g as coset representative.
  struct Cusp {
    std::size_t frame;
    Word coset;
    Matrix g;
    double angle;
  };
  std::vector<PeripheralFrame> frames;
  std::vector<Cusp> cusps;
  for (std::size_t i = 0; i < pres.peripherals().size(); ++i) {
    frames.push_back(peripheral_frame(pres, i));
    const PeripheralFrame& f = frames.back();
    auto add = [&](const Word& w, const Matrix& g) {
      const double a = angle_of(g.apply(f.fixed));
      for (const Cusp& c : cusps)
        if (fubini_study(unit_at(c.angle), unit_at(a)) < 1e-9) return;
      cusps.push_back({i, w, g, a});
    };
    add(Word{}, Matrix::identity(2));
    for (const Element& e : ball)
      if (e.word.size() <= params.cusp_depth) add(e.word, e.m);
  }

  std::vector<Arc> cusp_domains;
  for (const Cusp& c : cusps) {
    const PeripheralFrame& f = frames[c.frame];
    const double pa = angle_of(f.fixed);
    cusp_domains.push_back(arc_image(c.g, Arc{pa - params.parabolic_radius, 2.0 * params.parabolic_radius}));
  }

  // Every U_b that can follow a cusp vertex lies in N(K, v + r) or is a
  // cusp domain meeting K.
  for (std::size_t ci = 0; ci < cusps.size(); ++ci) {
    const Cusp& c = cusps[ci];
    const PeripheralFrame& f = frames[c.frame];
    std::vector<Arc> region{widen(f.k, v + r + eps)};
    for (const Arc& u : cusp_domains)
      if (arcs_meet(u, f.k)) region.push_back(widen(u, eps));
    for (const Arc& a : region)
      if (a.width >= kPi) synthesis_failed("parabolic neighborhood: N(K_p) is not a proper arc", c.angle);
    const Arc& target = cusp_domains[ci];
    const long long span = static_cast<long long>(params.truncation) / 2 + 4;
    auto good = [&](long long n) {
      const Matrix m = c.g * power(f.t, n);
      for (const Arc& a : region)
        if (!arc_contains(target, arc_image(m, a), params.margin)) return false;
      return true;
    };
    long long n0 = 1;
    for (;; ++n0) {
      if (n0 > 100000) synthesis_failed("parabolic neighborhood: no cofinite T_q maps K_p into U_q", c.angle);
      bool all = true;
      for (long long n = n0; n <= n0 + span && all; ++n) all = good(n) && good(-n);
      if (all) break;
    }
    const double nu = std::atan(1.0 / ((static_cast<double>(n0) + 0.5) * std::abs(f.tau)));
    const double pa = angle_of(f.fixed);
    const Arc cover = arc_image(c.g, Arc{pa - nu, 2.0 * nu});
    if (!arc_contains(target, cover)) synthesis_failed("parabolic neighborhood: V_q is not inside U_q", c.angle);
    SynthesizedVertex sv;
    sv.id = "cusp" + std::to_string(ci);
    sv.parabolic = true;
    sv.point = c.angle;
    sv.cover = cover;
    sv.domain = target;
    sv.word = c.coset;
    sv.n0 = n0;
    verts.push_back(std::move(sv));
  }

  // Conical centers spaced along the arcs left uncovered by the cusps.
  const std::vector<Arc> outside = params.boundary.empty() ? std::vector<Arc>{} : uncovered(params.boundary);
  std::vector<Arc> cusp_covers = outside;
  for (const SynthesizedVertex& s : verts) cusp_covers.push_back(s.cover);
  std::vector<double> centers;
  for (const Arc& gap : uncovered(cusp_covers)) {
    const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(gap.width / (1.6 * v))));
    const double step = gap.width / static_cast<double>(k);
    for (std::size_t j = 0; j < k; ++j) centers.push_back(wrap_angle(gap.lo + (static_cast<double>(j) + 0.5) * step));
  }
  std::sort(centers.begin(), centers.end());
  // With a boundary restriction, a center whose cover some g^-1 moves off
  // every boundary arc sees no limit point and is dropped.
  std::vector<Arc> dropped;
  auto misses_limit_set = [&](const Arc& cover) {
    if (params.boundary.empty()) return false;
    for (const Element& e : ball) {
      const Arc moved = arc_image(e.inv, cover);
      bool meets = false;
      for (const Arc& b : params.boundary) meets = meets || arcs_meet(moved, b);
      if (!meets) return true;
    }
    return false;
  };
  std::size_t conical = 0;
  for (const double c : centers) {
    SynthesizedVertex sv;
    sv.point = c;
    sv.cover = Arc{c - v, 2.0 * v};
    sv.domain = Arc{c - r, 2.0 * r};
    if (misses_limit_set(sv.cover)) {
      dropped.push_back(sv.cover);
      continue;
    }
    sv.id = "z" + std::to_string(conical++);
    verts.push_back(std::move(sv));
  }
  {
    std::vector<Arc> all = outside;
    all.insert(all.end(), dropped.begin(), dropped.end());
    for (const SynthesizedVertex& s : verts) all.push_back(s.cover);
    const std::vector<Arc> holes = uncovered(all);
    if (!holes.empty()) synthesis_failed("cover: the sets V_a miss a boundary arc", holes.front().center());
  }

  std::vector<GraphEdge> edges;
  std::size_t searched = 0;
  for (std::size_t a = 0; a < verts.size(); ++a) {
    SynthesizedVertex& s = verts[a];
    if (s.parabolic) {
      const Cusp& c = cusps[a];
      const PeripheralFrame& f = frames[c.frame];
      std::vector<Arc> succ_covers;
      for (std::size_t b = 0; b < verts.size(); ++b)
        if (arcs_meet(verts[b].cover, f.k)) {
          edges.push_back({a, b});
          succ_covers.push_back(verts[b].cover);
        }
      // V-hat_p must contain K_p: the successors' covers cover K.
      const double lo = f.k.lo, w = f.k.width;
      std::vector<Arc> comp = succ_covers;
      comp.push_back(Arc{lo + w, kPi - w});
      if (!uncovered(comp).empty()) synthesis_failed("parabolic neighborhood: successor covers miss K_p", c.angle);
      continue;
    }
    bool found = false;
    for (const Element& e : ball) {
      ++searched;
      const Arc expanded_v = arc_image(e.inv, s.cover);
      const Arc expanded_u = arc_image(e.inv, s.domain);
      if (!arc_contains(expanded_u, widen(expanded_v, params.delta))) continue;
      std::vector<std::size_t> succ;
      bool ok = true;
      for (std::size_t b = 0; b < verts.size() && ok; ++b) {
        if (!arcs_meet(verts[b].cover, expanded_v)) continue;
        const Arc nb = widen(verts[b].domain, eps);
        ok = nb.width < kPi && arc_contains(s.domain, arc_image(e.m, nb), params.margin);
        succ.push_back(b);
      }
      if (!ok || succ.empty()) continue;
      s.word = e.word;
      for (std::size_t b : succ) edges.push_back({a, b});
      found = true;
      break;
    }
    if (!found) synthesis_failed("conical expansion: no word of length <= R expands V_z into W_z", s.point);
  }

  std::vector<GraphVertex> gv;
  std::vector<ProperDomain> domains, covers, boundary;
  for (const SynthesizedVertex& s : verts) {
    if (s.parabolic) {
      const Cusp& c = cusps[&s - verts.data()];
      const PeripheralFrame& f = frames[c.frame];
      ParabolicLabel lab;
      lab.coset = c.coset;
      lab.peripheral = f.peripheral;
      lab.truncation = params.truncation;
      for (long long n = 1; n < s.n0; ++n) {
        lab.excluded.push_back(concat(c.coset, letter_power(f.letter - 1, n)));
        lab.excluded.push_back(concat(c.coset, letter_power(f.letter - 1, -n)));
      }
      gv.push_back({s.id, lab});
    } else {
      gv.push_back({s.id, SingletonLabel{s.word}});
    }
    domains.push_back(arc_domain(s.domain));
    covers.push_back(arc_domain(s.cover));
    boundary.push_back(arc_domain(s.domain));
  }
  SynthesisResult out{GammaGraph(pres, std::move(gv), std::move(edges), eps), CompatibleSystem(std::move(domains)),
                      std::move(verts), std::move(covers), std::move(boundary), searched};
  return out;
}

}  // namespace flagcert
