#include "flagcert/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "flagcert/errors.hpp"
#include "flagcert/sampling.hpp"
#include "parallel.hpp"

namespace flagcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t shell_of(const GroupPresentation& pres, const Peripheral& p, const Word& w) {
  if (!p.abelian) return w.size();
  std::map<int, long long> exps;
  for (int l : w.letters) exps[std::abs(l)] += l > 0 ? 1 : -1;
  long long s = 0;
  for (const auto& [g, e] : exps) s = std::max(s, std::llabs(e));
  (void)pres;
  return static_cast<std::size_t>(s);
}

}  // namespace

GammaGraph::GammaGraph(const GroupPresentation& pres, std::vector<GraphVertex> vertices, std::vector<GraphEdge> edges,
                       double epsilon)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0)) fail(ErrorCode::InvalidGraph, "epsilon must be positive");
  if (vertices_.empty()) fail(ErrorCode::InvalidGraph, "graph has no vertices");
  std::set<std::string> ids;
  for (const GraphVertex& v : vertices_)
    if (!ids.insert(v.id).second) fail(ErrorCode::InvalidGraph, "duplicate vertex id " + v.id);

  successors_.resize(vertices_.size());
  for (const GraphEdge& e : edges_) {
    if (e.from >= vertices_.size() || e.to >= vertices_.size()) fail(ErrorCode::InvalidGraph, "edge endpoint out of range");
    successors_[e.from].push_back(e.to);
  }
  for (std::size_t v = 0; v < vertices_.size(); ++v)
    if (successors_[v].empty()) fail(ErrorCode::InvalidGraph, "vertex " + vertices_[v].id + " has no outgoing edge");

  const Matrix id = Matrix::identity(pres.dim());
  for (const GraphVertex& v : vertices_) {
    std::vector<Word> elems;
    std::vector<std::size_t> shells;
    if (const auto* s = std::get_if<SingletonLabel>(&v.label)) {
      const Word w = reduce(s->word);
      if (w.empty() || projectively_equal(pres.evaluate(w), id, 1e-12))
        fail(ErrorCode::InvalidGraph, "singleton vertex " + v.id + " is labelled by the identity");
      elems.push_back(w);
      shells.push_back(1);
    } else {
      const auto& p = std::get<ParabolicLabel>(v.label);
      if (p.peripheral >= pres.peripherals().size()) fail(ErrorCode::InvalidGraph, "vertex " + v.id + " names an unknown peripheral");
      const Peripheral& per = pres.peripherals()[p.peripheral];
      const std::size_t want = p.truncation != 0 ? p.truncation : per.truncation;
      std::set<std::string> excluded;
      for (const Word& x : p.excluded) excluded.insert(pres.element_key(concat(Word{}, x)));
      std::set<std::string> seen;
      std::size_t ask = want + p.excluded.size() + 1;
      std::vector<Word> base = pres.peripheral_elements(p.peripheral, ask);
      for (const Word& q : base) {
        if (elems.size() >= want) break;
        const Word w = concat(p.coset, q);
        const std::string key = pres.element_key(w);
        if (excluded.count(key) != 0) continue;
        if (!seen.insert(key).second) fail(ErrorCode::InvalidGraph, "parabolic enumeration of " + v.id + " repeats an element");
        elems.push_back(w);
        shells.push_back(shell_of(pres, per, q));
      }
      if (elems.empty()) fail(ErrorCode::InvalidGraph, "parabolic vertex " + v.id + " has an empty enumeration");
    }
    elements_.push_back(std::move(elems));
    shells_.push_back(std::move(shells));
  }
}

std::size_t GammaGraph::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i].id == id) return i;
  fail(ErrorCode::InvalidGraph, "unknown vertex " + std::string(id));
}

double domain_gap(const ProperDomain& a, const ProperDomain& b, std::size_t budget) {
  double gap = kInf;
  const std::size_t na = a.dim() == 2 ? 2 * a.balls().size() + 2 : budget;
  const std::size_t nb = b.dim() == 2 ? 2 * b.balls().size() + 2 : budget;
  for (std::size_t i = 0; i < na; ++i) gap = std::min(gap, -b.margin(a.boundary_sample(i)));
  for (std::size_t i = 0; i < nb; ++i) gap = std::min(gap, -a.margin(b.boundary_sample(i)));
  return std::max(gap, 0.0);
}

CompatibleSystem::CompatibleSystem(std::vector<ProperDomain> domains, std::vector<SeparationEntry> separation)
    : domains_(std::move(domains)), separation_(std::move(separation)) {
  for (const SeparationEntry& s : separation_)
    if (s.a >= domains_.size() || s.b >= domains_.size()) fail(ErrorCode::MissingDomain, "separation entry names a missing domain");
}

const ProperDomain& CompatibleSystem::domain(std::size_t v) const {
  if (v >= domains_.size()) fail(ErrorCode::MissingDomain, "no domain assigned to vertex " + std::to_string(v));
  return domains_[v];
}

std::vector<SeparationCheck> CompatibleSystem::check_separation(std::size_t budget) const {
  std::vector<SeparationCheck> out;
  for (const SeparationEntry& s : separation_) {
    SeparationCheck c;
    c.entry = s;
    c.measured = domain_gap(domains_[s.a], domains_[s.b], budget);
    c.ok = c.measured >= s.delta;
    out.push_back(c);
  }
  return out;
}

double CompatibleSystem::default_epsilon(std::size_t budget) const {
  double g = kInf;
  for (std::size_t i = 0; i < domains_.size(); ++i)
    for (std::size_t j = i + 1; j < domains_.size(); ++j) g = std::min(g, domain_gap(domains_[i], domains_[j], budget));
  if (!std::isfinite(g) || g <= 0.0) fail(ErrorCode::InvalidDomain, "domains must be pairwise disjoint to derive epsilon");
  return 0.1 * g;
}

Certificate verify_compatibility(const GammaGraph& graph, const CompatibleSystem& system, const GroupPresentation& pres,
                                 const CertifyOptions& options) {
  if (system.domains().size() < graph.size()) fail(ErrorCode::MissingDomain, "some vertices have no domain");
  for (const ProperDomain& d : system.domains())
    if (d.dim() != pres.dim()) fail(ErrorCode::DimensionMismatch, "domain dimension differs from the presentation");

  Certificate cert;
  cert.epsilon = graph.epsilon();
  cert.budget = options.budget;

  std::vector<std::vector<Vec>> samples(graph.size());
  std::vector<Vec> centers(graph.size());
  for (const GraphEdge& e : graph.edges()) {
    if (samples[e.to].empty()) {
      samples[e.to] = system.domain(e.to).neighborhood_samples(graph.epsilon(), options.budget);
      centers[e.to] = system.domain(e.to).center_point();
    }
  }

  for (std::size_t ei = 0; ei < graph.edges().size(); ++ei) {
    const GraphEdge& e = graph.edges()[ei];
    for (std::size_t k = 0; k < graph.elements(e.from).size(); ++k) {
      CertificateRecord r;
      r.edge = ei;
      r.from = e.from;
      r.to = e.to;
      r.element_index = k;
      r.shell = graph.shells(e.from)[k];
      r.element = graph.elements(e.from)[k];
      cert.records.push_back(std::move(r));
    }
  }

  detail::parallel_for(cert.records.size(), options.threads, [&](std::size_t i) {
    CertificateRecord& r = cert.records[i];
    const Matrix m = pres.evaluate(r.element);
    const ProperDomain& target = system.domain(r.from);
    const Vec c = m.apply(centers[r.to]);
    double worst = kInf, radius = 0.0;
    for (const Vec& y : samples[r.to]) {
      const Vec z = m.apply(y);
      worst = std::min(worst, target.margin(z));
      radius = std::max(radius, fubini_study(c, z));
    }
    r.margin = worst;
    r.image_radius = radius;
    r.samples = samples[r.to].size();
    r.pass = worst > options.tolerance;
  });

  cert.min_margin = kInf;
  for (std::size_t i = 0; i < cert.records.size(); ++i) {
    cert.min_margin = std::min(cert.min_margin, cert.records[i].margin);
    if (!cert.records[i].pass && !cert.first_failure) cert.first_failure = i;
  }

  for (std::size_t ei = 0; ei < graph.edges().size(); ++ei) {
    const GraphEdge& e = graph.edges()[ei];
    if (!graph.is_parabolic(e.from)) continue;
    std::map<std::size_t, std::pair<double, double>> per_shell;
    for (const CertificateRecord& r : cert.records) {
      if (r.edge != ei) continue;
      auto [it, fresh] = per_shell.try_emplace(r.shell, r.margin, r.image_radius);
      if (!fresh) {
        it->second.first = std::min(it->second.first, r.margin);
        it->second.second = std::max(it->second.second, r.image_radius);
      }
    }
    std::vector<std::pair<double, double>> seq;
    for (const auto& [s, v] : per_shell) seq.push_back(v);
    TailReport t;
    t.edge = ei;
    t.vertex = e.from;
    const std::size_t q = std::min(seq.size(), std::max<std::size_t>(2, seq.size() / 4));
    t.shells_checked = q;
    t.margins_nondecreasing = true;
    t.radii_decreasing = true;
    for (std::size_t i = seq.size() - q + 1; i < seq.size(); ++i) {
      if (seq[i].first < seq[i - 1].first - 1e-12) t.margins_nondecreasing = false;
      if (!(seq[i].second < seq[i - 1].second)) t.radii_decreasing = false;
    }
    t.pass = q >= 2 && t.margins_nondecreasing && t.radii_decreasing;
    cert.tails.push_back(t);
  }

  cert.separation = system.check_separation();
  cert.pass = !cert.first_failure && !cert.records.empty();
  for (const TailReport& t : cert.tails) cert.pass = cert.pass && t.pass;
  for (const SeparationCheck& s : cert.separation) cert.pass = cert.pass && s.ok;
  return cert;
}

std::vector<DivergenceWitness> check_divergence(const GammaGraph& graph, const CompatibleSystem& system,
                                                const GroupPresentation& pres, std::size_t budget) {
  std::vector<DivergenceWitness> out;
  for (std::size_t ei = 0; ei < graph.edges().size(); ++ei) {
    const GraphEdge& e = graph.edges()[ei];
    const ProperDomain& uv = system.domain(e.from);
    const ProperDomain& uw = system.domain(e.to);
    const Matrix inv = inverse(pres.evaluate(graph.elements(e.from).front()));
    DivergenceWitness w;
    w.edge = ei;
    for (std::size_t i = 0; i < budget && !w.found; ++i) {
      // Alternate interior samples with points just inside the boundary.
      const Vec x = i % 2 == 0 ? uv.interior_sample(i / 2) : uv.push_outward(uv.boundary_sample(i / 2), -1e-6);
      if (!uv.contains(x)) continue;
      const double m = uw.margin(inv.apply(x));
      if (m < -1e-12) {
        w.found = true;
        w.witness = normalized(x);
        w.depth = -m;
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

GroupPresentation family_at(const GroupPresentation& base, const std::vector<FamilyPath>& paths, double t) {
  GroupPresentation p = base;
  for (const FamilyPath& f : paths) {
    const std::size_t idx = p.generator_index(f.generator);
    Matrix step = f.base * expm(t * f.deform);
    Matrix m = power(step, f.power);
    const Matrix c = f.conjugator.empty() ? Matrix::identity(p.dim()) : f.conjugator;
    p.set_generator(idx, c * m * inverse(c));
  }
  return p;
}

ProbeResult peripheral_stability_probe(const GroupPresentation& base, const std::vector<FamilyPath>& paths,
                                       const std::vector<double>& t_grid, const GammaGraph& graph,
                                       const CompatibleSystem& system, const CertifyOptions& options) {
  const Certificate c0 = verify_compatibility(graph, system, family_at(base, paths, 0.0), options);
  if (!c0.pass) fail(ErrorCode::BaseFails, "the unperturbed representation does not certify");
  ProbeResult out;
  out.first_fail_per_edge.assign(graph.edges().size(), std::nullopt);
  for (double t : t_grid) {
    const Certificate c = verify_compatibility(graph, system, family_at(base, paths, t), options);
    ProbeStep s;
    s.t = t;
    s.pass = c.pass;
    s.min_margin = c.min_margin;
    s.first_failure = c.first_failure;
    for (const CertificateRecord& r : c.records)
      if (!r.pass && !out.first_fail_per_edge[r.edge]) out.first_fail_per_edge[r.edge] = t;
    if (!c.pass && !out.first_failing_t) out.first_failing_t = t;
    out.steps.push_back(s);
  }
  return out;
}

std::string path_code(const GammaGraph& graph, const std::vector<std::size_t>& vertices,
                      const std::vector<std::size_t>& element_indices) {
  std::string code;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (i > 0) code += '.';
    code += graph.vertices()[vertices[i]].id;
    if (graph.is_parabolic(vertices[i])) code += '[' + std::to_string(element_indices[i]) + ']';
  }
  return code;
}

const Word& path_element(const GammaGraph& graph, const GPath& path, std::size_t i) {
  return graph.elements(path.vertices.at(i)).at(path.element_indices.at(i));
}

namespace {

void exhaustive(const GammaGraph& g, std::size_t depth, std::size_t cap, std::vector<std::size_t>& vs,
                std::vector<std::size_t>& es, PathEnumeration& out) {
  if (out.truncated) return;
  if (vs.size() == depth) {
    if (out.paths.size() >= cap) {
      out.truncated = true;
      return;
    }
    out.paths.push_back({vs, es, path_code(g, vs, es)});
    return;
  }
  const std::vector<std::size_t> nexts = vs.empty() ? std::vector<std::size_t>{} : g.successors(vs.back());
  auto visit = [&](std::size_t v) {
    for (std::size_t k = 0; k < g.elements(v).size() && !out.truncated; ++k) {
      vs.push_back(v);
      es.push_back(k);
      exhaustive(g, depth, cap, vs, es, out);
      vs.pop_back();
      es.pop_back();
    }
  };
  if (vs.empty()) {
    for (std::size_t v = 0; v < g.size() && !out.truncated; ++v) visit(v);
  } else {
    for (std::size_t v : nexts) {
      if (out.truncated) break;
      visit(v);
    }
  }
}

}  // namespace

PathEnumeration enumerate_paths(const GammaGraph& graph, std::size_t depth, const PathOptions& options) {
  if (depth == 0) fail(ErrorCode::InvalidGraph, "path depth must be at least 1");
  PathEnumeration out;
  switch (options.strategy) {
    case PathStrategy::Exhaustive: {
      std::vector<std::size_t> vs, es;
      exhaustive(graph, depth, options.cap, vs, es, out);
      break;
    }
    case PathStrategy::Random: {
      std::mt19937_64 rng(options.seed);
      for (std::size_t n = 0; n < options.count; ++n) {
        GPath p;
        std::size_t v = uniform_index(rng, graph.size());
        for (std::size_t i = 0; i < depth; ++i) {
          if (i > 0) {
            const auto& s = graph.successors(v);
            v = s[uniform_index(rng, s.size())];
          }
          p.vertices.push_back(v);
          p.element_indices.push_back(uniform_index(rng, graph.elements(v).size()));
        }
        p.code = path_code(graph, p.vertices, p.element_indices);
        out.paths.push_back(std::move(p));
      }
      break;
    }
    case PathStrategy::Spine: {
      if (options.spine.empty()) fail(ErrorCode::InvalidGraph, "spine strategy needs a vertex sequence");
      GPath p;
      for (std::size_t i = 0; i < depth; ++i) {
        const std::size_t v = options.spine[i % options.spine.size()];
        if (v >= graph.size()) fail(ErrorCode::InvalidGraph, "spine vertex out of range");
        if (i > 0) {
          const auto& s = graph.successors(p.vertices.back());
          if (std::find(s.begin(), s.end(), v) == s.end()) fail(ErrorCode::InvalidGraph, "spine is not a path of the graph");
        }
        p.vertices.push_back(v);
        p.element_indices.push_back(0);
      }
      p.code = path_code(graph, p.vertices, p.element_indices);
      out.paths.push_back(std::move(p));
      break;
    }
  }
  return out;
}

}  // namespace flagcert
