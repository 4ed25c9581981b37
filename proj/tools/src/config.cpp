#include "flagcert_cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

#include "flagcert/errors.hpp"

namespace flagcert::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorCode::ConfigError, where + ": " + what);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.contains(key)) bad(where, "unknown key \"" + key + "\"");
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing key \"") + key + "\"");
  return *it;
}

long long parse_integer(std::string_view s, const std::string& where) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) bad(where, "not an integer: \"" + std::string(s) + "\"");
  return v;
}

// Numbers are JSON numbers or strings "p/q" and decimal literals; the
// rational form keeps values like 1/3 reviewable in the config.
double number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) bad(where, "expected a number");
  const std::string s = j.get<std::string>();
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const long long p = parse_integer(std::string_view(s).substr(0, slash), where);
    const long long q = parse_integer(std::string_view(s).substr(slash + 1), where);
    if (q == 0) bad(where, "zero denominator");
    return static_cast<double>(p) / static_cast<double>(q);
  }
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) bad(where, "not a number: \"" + s + "\"");
  return v;
}

double positive(const json& j, const std::string& where) {
  const double v = number(j, where);
  if (!(v > 0.0)) bad(where, "must be positive");
  return v;
}

std::size_t count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) bad(where, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

Vec vector_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a nonempty array of numbers");
  Vec v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

Vec sized(const json& j, std::size_t dim, const std::string& where) {
  Vec v = vector_of(j, where);
  if (v.size() != dim) bad(where, "expected " + std::to_string(dim) + " entries, got " + std::to_string(v.size()));
  return v;
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  std::size_t n = 0;
  for (const Matrix& b : blocks) n += b.dim();
  Matrix out(n);
  std::size_t at = 0;
  for (const Matrix& b : blocks) {
    for (std::size_t i = 0; i < b.dim(); ++i)
      for (std::size_t j = 0; j < b.dim(); ++j) out(at + i, at + j) = b(i, j);
    at += b.dim();
  }
  return out;
}

Matrix matrix_of(const json& j, const std::string& where) {
  if (j.is_array()) {
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < j.size(); ++i) rows.push_back(vector_of(j[i], where + "[" + std::to_string(i) + "]"));
    for (const Vec& r : rows)
      if (r.size() != rows.size()) bad(where, "matrix must be square");
    return Matrix::from_rows(rows);
  }
  if (!j.is_object() || j.empty()) bad(where, "expected rows or a matrix expression");
  if (j.contains("rows")) {
    check_keys(j, {"rows"}, where);
    return matrix_of(j["rows"], where + ".rows");
  }
  if (j.contains("identity")) {
    check_keys(j, {"identity"}, where);
    const std::size_t n = count(j["identity"], where + ".identity");
    if (n == 0 || n > kMaxDimension) bad(where, "identity size out of range");
    return Matrix::identity(n);
  }
  if (j.contains("diagonal")) {
    check_keys(j, {"diagonal"}, where);
    const Vec d = vector_of(j["diagonal"], where + ".diagonal");
    return Matrix::diagonal(d);
  }
  if (j.contains("rotation_pi")) {
    check_keys(j, {"rotation_pi"}, where);
    const double a = std::numbers::pi * number(j["rotation_pi"], where + ".rotation_pi");
    return Matrix::from_rows({{std::cos(a), -std::sin(a)}, {std::sin(a), std::cos(a)}});
  }
  if (j.contains("blocks")) {
    check_keys(j, {"blocks"}, where);
    std::vector<Matrix> blocks;
    for (std::size_t i = 0; i < j["blocks"].size(); ++i)
      blocks.push_back(matrix_of(j["blocks"][i], where + ".blocks[" + std::to_string(i) + "]"));
    if (blocks.empty()) bad(where, "no blocks");
    return block_diagonal(blocks);
  }
  if (j.contains("product")) {
    check_keys(j, {"product"}, where);
    const json& fs = j["product"];
    if (!fs.is_array() || fs.empty()) bad(where, "product needs a nonempty array");
    Matrix out = matrix_of(fs[0], where + ".product[0]");
    for (std::size_t i = 1; i < fs.size(); ++i) {
      const Matrix f = matrix_of(fs[i], where + ".product[" + std::to_string(i) + "]");
      if (f.dim() != out.dim()) bad(where, "product factors differ in size");
      out = out * f;
    }
    return out;
  }
  if (j.contains("power")) {
    check_keys(j, {"power", "of"}, where);
    if (!j["power"].is_number_integer()) bad(where + ".power", "expected an integer");
    return power(matrix_of(require(j, "of", where), where + ".of"), j["power"].get<long long>());
  }
  if (j.contains("conjugate")) {
    check_keys(j, {"conjugate", "by"}, where);
    const Matrix m = matrix_of(j["conjugate"], where + ".conjugate");
    const Matrix c = matrix_of(require(j, "by", where), where + ".by");
    if (c.dim() != m.dim()) bad(where, "conjugator size differs");
    return c * m * inverse(c);
  }
  if (j.contains("inverse")) {
    check_keys(j, {"inverse"}, where);
    return inverse(matrix_of(j["inverse"], where + ".inverse"));
  }
  bad(where, "unknown matrix expression");
}

Matrix square(const json& j, std::size_t dim, const std::string& where) {
  Matrix m = matrix_of(j, where);
  if (m.dim() != dim) bad(where, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  return m;
}

// Points are homogeneous arrays; in RP^1 a bare number t means [t : 1].
ProjPoint point_of(const json& j, std::size_t dim, const std::string& where) {
  if (dim == 2 && (j.is_number() || j.is_string())) return rp1_from_real(number(j, where));
  return ProjPoint(sized(j, dim, where));
}

std::uint64_t seed_of(const json& body, const std::string& where) {
  return body.contains("seed") ? count(body["seed"], where + ".seed") : 0;
}

ProperDomain domain_of(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_object() || j.size() != 1) bad(where, "a domain has exactly one kind key");
  const std::string kind = j.begin().key();
  const json& body = j.begin().value();
  const std::string at = where + "." + kind;
  if (kind == "fs_ball") {
    check_keys(body, {"center", "radius", "seed"}, at);
    return ProperDomain::fs_ball(point_of(require(body, "center", at), dim, at + ".center"),
                                 positive(require(body, "radius", at), at + ".radius"), seed_of(body, at));
  }
  if (kind == "interval") {
    if (dim != 2) bad(at, "intervals need dimension 2");
    const Vec v = sized(body, 2, at);
    return ProperDomain::rp1_interval(v[0], v[1]);
  }
  if (kind == "chart_ball") {
    check_keys(body, {"chart", "center", "radius", "seed"}, at);
    return ProperDomain::chart_ball(ProjHyperplane(sized(require(body, "chart", at), dim, at + ".chart")),
                                    sized(require(body, "center", at), dim - 1, at + ".center"),
                                    positive(require(body, "radius", at), at + ".radius"), seed_of(body, at));
  }
  if (kind == "polytope") {
    check_keys(body, {"chart", "vertices", "seed"}, at);
    std::vector<Vec> verts;
    const json& vs = require(body, "vertices", at);
    if (!vs.is_array()) bad(at + ".vertices", "expected an array");
    for (std::size_t i = 0; i < vs.size(); ++i)
      verts.push_back(sized(vs[i], dim - 1, at + ".vertices[" + std::to_string(i) + "]"));
    return ProperDomain::polytope(ProjHyperplane(sized(require(body, "chart", at), dim, at + ".chart")),
                                  std::move(verts), seed_of(body, at));
  }
  if (kind == "ball_union") {
    check_keys(body, {"chart", "balls", "seed"}, at);
    std::vector<ChartBallSpec> balls;
    const json& bs = require(body, "balls", at);
    if (!bs.is_array()) bad(at + ".balls", "expected an array");
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const std::string bw = at + ".balls[" + std::to_string(i) + "]";
      check_keys(bs[i], {"center", "radius"}, bw);
      balls.push_back({sized(require(bs[i], "center", bw), dim - 1, bw + ".center"),
                       positive(require(bs[i], "radius", bw), bw + ".radius")});
    }
    return ProperDomain::ball_union(ProjHyperplane(sized(require(body, "chart", at), dim, at + ".chart")),
                                    std::move(balls), seed_of(body, at));
  }
  bad(where, "unknown domain kind \"" + kind + "\"");
}

Word word_of(const GroupPresentation& pres, const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a word string");
  try {
    return pres.parse(j.get<std::string>());
  } catch (const Error& e) {
    bad(where, e.what());
  }
}

void parse_presentation(RunConfig& cfg, const json& root) {
  const std::size_t dim = count(require(root, "dimension", "config"), "dimension");
  if (dim < 2 || dim > kMaxDimension) bad("dimension", "must lie in [2, " + std::to_string(kMaxDimension) + "]");
  GroupPresentation pres(dim);
  if (root.contains("free_model")) {
    if (!root["free_model"].is_boolean()) bad("free_model", "expected true or false");
    pres.set_free_model(root["free_model"].get<bool>());
  }
  const json gens = root.contains("generators") ? root["generators"] : json::array();
  if (!gens.is_array()) bad("generators", "expected an array");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string where = "generators[" + std::to_string(i) + "]";
    check_keys(gens[i], {"name", "matrix"}, where);
    const json& name = require(gens[i], "name", where);
    if (!name.is_string() || name.get<std::string>().empty()) bad(where + ".name", "expected a nonempty string");
    const Matrix m = square(require(gens[i], "matrix", where), dim, where + ".matrix");
    if (std::abs(determinant(m)) < 1e-300) bad(where + ".matrix", "singular matrix");
    pres.add_generator(name.get<std::string>(), m);
  }
  if (root.contains("peripherals")) {
    const json& ps = root["peripherals"];
    if (!ps.is_array()) bad("peripherals", "expected an array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string where = "peripherals[" + std::to_string(i) + "]";
      check_keys(ps[i], {"name", "generators", "truncation", "abelian"}, where);
      Peripheral p;
      p.name = require(ps[i], "name", where).get<std::string>();
      for (const json& g : require(ps[i], "generators", where)) {
        if (!g.is_string()) bad(where + ".generators", "expected generator names");
        p.generators.push_back(pres.generator_index(g.get<std::string>()));
      }
      if (ps[i].contains("truncation")) p.truncation = count(ps[i]["truncation"], where + ".truncation");
      if (ps[i].contains("abelian")) p.abelian = ps[i]["abelian"].get<bool>();
      pres.add_peripheral(std::move(p));
    }
  }
  pres.validate();
  cfg.presentation = std::move(pres);
}

void parse_graph(RunConfig& cfg, const json& root) {
  const bool has_graph = root.contains("graph");
  const bool has_domains = root.contains("domains");
  if (!has_graph && !has_domains) return;
  if (!has_graph || !has_domains) bad("config", "\"graph\" and \"domains\" must appear together");
  const GroupPresentation& pres = cfg.presentation;
  const std::size_t dim = pres.dim();

  const json& g = root["graph"];
  check_keys(g, {"epsilon", "vertices", "edges"}, "graph");
  const json& vs = require(g, "vertices", "graph");
  if (!vs.is_array() || vs.empty()) bad("graph.vertices", "expected a nonempty array");
  std::vector<GraphVertex> vertices;
  std::map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string where = "graph.vertices[" + std::to_string(i) + "]";
    const json& v = vs[i];
    const json& id = require(v, "id", where);
    if (!id.is_string()) bad(where + ".id", "expected a string");
    if (!ids.emplace(id.get<std::string>(), i).second) bad(where + ".id", "duplicate id " + id.get<std::string>());
    if (v.contains("word")) {
      check_keys(v, {"id", "word"}, where);
      vertices.push_back({id.get<std::string>(), SingletonLabel{word_of(pres, v["word"], where + ".word")}});
      continue;
    }
    check_keys(v, {"id", "coset", "peripheral", "excluded", "truncation"}, where);
    ParabolicLabel label;
    if (v.contains("coset")) label.coset = word_of(pres, v["coset"], where + ".coset");
    const json& per = require(v, "peripheral", where);
    if (!per.is_string()) bad(where + ".peripheral", "expected a peripheral name");
    try {
      label.peripheral = pres.peripheral_index(per.get<std::string>());
    } catch (const Error& e) {
      bad(where + ".peripheral", e.what());
    }
    if (v.contains("excluded"))
      for (std::size_t k = 0; k < v["excluded"].size(); ++k)
        label.excluded.push_back(word_of(pres, v["excluded"][k], where + ".excluded[" + std::to_string(k) + "]"));
    if (v.contains("truncation")) label.truncation = count(v["truncation"], where + ".truncation");
    vertices.push_back({id.get<std::string>(), std::move(label)});
  }

  const json& es = require(g, "edges", "graph");
  if (!es.is_array()) bad("graph.edges", "expected an array of [from, to] pairs");
  std::vector<GraphEdge> edges;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string where = "graph.edges[" + std::to_string(i) + "]";
    if (!es[i].is_array() || es[i].size() != 2 || !es[i][0].is_string() || !es[i][1].is_string())
      bad(where, "expected [from, to]");
    const auto from = ids.find(es[i][0].get<std::string>());
    const auto to = ids.find(es[i][1].get<std::string>());
    if (from == ids.end() || to == ids.end()) bad(where, "unknown vertex id");
    edges.push_back({from->second, to->second});
  }

  const json& ds = root["domains"];
  if (!ds.is_object()) bad("domains", "expected an object keyed by vertex id");
  for (const auto& [key, value] : ds.items())
    if (!ids.contains(key)) bad("domains", "no vertex named \"" + key + "\"");
  std::vector<ProperDomain> domains;
  for (const GraphVertex& v : vertices) {
    if (!ds.contains(v.id)) bad("domains", "missing domain for vertex \"" + v.id + "\"");
    domains.push_back(domain_of(ds[v.id], dim, "domains." + v.id));
  }

  std::vector<SeparationEntry> separation;
  if (root.contains("separation")) {
    const json& ss = root["separation"];
    if (!ss.is_array()) bad("separation", "expected an array");
    for (std::size_t i = 0; i < ss.size(); ++i) {
      const std::string where = "separation[" + std::to_string(i) + "]";
      check_keys(ss[i], {"a", "b", "delta"}, where);
      const auto a = ids.find(require(ss[i], "a", where).get<std::string>());
      const auto b = ids.find(require(ss[i], "b", where).get<std::string>());
      if (a == ids.end() || b == ids.end()) bad(where, "unknown vertex id");
      separation.push_back({a->second, b->second, positive(require(ss[i], "delta", where), where + ".delta")});
    }
  }

  CompatibleSystem system(std::move(domains), std::move(separation));
  double epsilon = 0.0;
  const json& eps = require(g, "epsilon", "graph");
  if (eps.is_string() && eps.get<std::string>() == "auto")
    epsilon = system.default_epsilon(cfg.budgets.boundary_samples);
  else
    epsilon = positive(eps, "graph.epsilon");
  cfg.graph.emplace(pres, std::move(vertices), std::move(edges), epsilon);
  cfg.system.emplace(std::move(system));
}

void parse_budgets(RunConfig& cfg, const json& root) {
  if (!root.contains("budgets")) return;
  const json& b = root["budgets"];
  check_keys(b, {"boundary_samples", "pair_samples", "paths", "depth", "depth_min", "cloud_paths", "cloud_depth"},
             "budgets");
  auto take = [&](const char* key, std::size_t& slot) {
    if (b.contains(key)) slot = count(b[key], std::string("budgets.") + key);
    if (slot == 0) bad(std::string("budgets.") + key, "must be positive");
  };
  take("boundary_samples", cfg.budgets.boundary_samples);
  take("pair_samples", cfg.budgets.pair_samples);
  take("paths", cfg.budgets.paths);
  take("depth", cfg.budgets.depth);
  take("depth_min", cfg.budgets.depth_min);
  take("cloud_paths", cfg.budgets.cloud_paths);
  take("cloud_depth", cfg.budgets.cloud_depth);
  if (cfg.budgets.depth_min >= cfg.budgets.depth) bad("budgets.depth_min", "must be below budgets.depth");
}

void parse_tolerances(RunConfig& cfg, const json& root) {
  if (!root.contains("tolerances")) return;
  const json& t = root["tolerances"];
  check_keys(t, {"incidence", "opposition", "nesting", "convergence"}, "tolerances");
  auto take = [&](const char* key, double& slot) {
    if (t.contains(key)) slot = positive(t[key], std::string("tolerances.") + key);
  };
  take("incidence", cfg.tolerances.incidence);
  take("opposition", cfg.tolerances.opposition);
  take("nesting", cfg.tolerances.nesting);
  take("convergence", cfg.tolerances.convergence);
}

void parse_probe(RunConfig& cfg, const json& root) {
  if (!root.contains("probe")) return;
  const json& p = root["probe"];
  check_keys(p, {"t_grid", "families"}, "probe");
  const std::size_t dim = cfg.presentation.dim();
  ProbeSection out;
  const json& grid = require(p, "t_grid", "probe");
  if (grid.is_object()) {
    check_keys(grid, {"from", "to", "steps"}, "probe.t_grid");
    const double lo = number(require(grid, "from", "probe.t_grid"), "probe.t_grid.from");
    const double hi = number(require(grid, "to", "probe.t_grid"), "probe.t_grid.to");
    const std::size_t n = count(require(grid, "steps", "probe.t_grid"), "probe.t_grid.steps");
    if (n < 2) bad("probe.t_grid.steps", "need at least 2");
    for (std::size_t i = 0; i < n; ++i)
      out.t_grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  } else {
    out.t_grid = vector_of(grid, "probe.t_grid");
  }
  const json& fs = require(p, "families", "probe");
  if (!fs.is_array() || fs.empty()) bad("probe.families", "expected a nonempty array");
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const std::string where = "probe.families[" + std::to_string(i) + "]";
    check_keys(fs[i], {"generator", "base", "deform", "power", "conjugator"}, where);
    FamilyPath f;
    f.generator = require(fs[i], "generator", where).get<std::string>();
    try {
      cfg.presentation.generator_index(f.generator);
    } catch (const Error& e) {
      bad(where + ".generator", e.what());
    }
    f.base = square(require(fs[i], "base", where), dim, where + ".base");
    f.deform = square(require(fs[i], "deform", where), dim, where + ".deform");
    if (fs[i].contains("power")) {
      if (!fs[i]["power"].is_number_integer()) bad(where + ".power", "expected an integer");
      f.power = fs[i]["power"].get<int>();
    }
    if (fs[i].contains("conjugator")) f.conjugator = square(fs[i]["conjugator"], dim, where + ".conjugator");
    out.families.push_back(std::move(f));
  }
  cfg.probe = std::move(out);
}

void parse_gaps(RunConfig& cfg, const json& root) {
  if (!root.contains("gaps")) return;
  const json& g = root["gaps"];
  check_keys(g, {"sequence", "k", "threshold"}, "gaps");
  const std::size_t dim = cfg.presentation.dim();
  GapsSection out;
  const json& s = require(g, "sequence", "gaps");
  if (s.contains("powers_of")) {
    check_keys(s, {"powers_of", "from", "to"}, "gaps.sequence");
    const Matrix m = square(s["powers_of"], dim, "gaps.sequence.powers_of");
    const std::size_t lo = s.contains("from") ? count(s["from"], "gaps.sequence.from") : 1;
    const std::size_t hi = count(require(s, "to", "gaps.sequence"), "gaps.sequence.to");
    if (hi < lo) bad("gaps.sequence", "empty range");
    Matrix x = power(m, static_cast<long long>(lo));
    for (std::size_t n = lo; n <= hi; ++n) {
      out.sequence.push_back(x);
      x = x * m;
      if (const double s_max = x.max_abs(); s_max > 1e100) x *= 1.0 / s_max;
    }
  } else {
    check_keys(s, {"matrices"}, "gaps.sequence");
    const json& ms = require(s, "matrices", "gaps.sequence");
    for (std::size_t i = 0; i < ms.size(); ++i)
      out.sequence.push_back(square(ms[i], dim, "gaps.sequence.matrices[" + std::to_string(i) + "]"));
  }
  if (out.sequence.empty()) bad("gaps.sequence", "no matrices");
  if (g.contains("k")) out.k = count(g["k"], "gaps.k");
  if (out.k < 1 || out.k >= dim) bad("gaps.k", "must lie in [1, dimension - 1]");
  if (g.contains("threshold")) out.threshold = positive(g["threshold"], "gaps.threshold");
  cfg.gaps = std::move(out);
}

void parse_hilbert(RunConfig& cfg, const json& root) {
  if (!root.contains("hilbert")) return;
  const json& h = root["hilbert"];
  check_keys(h, {"domain", "x", "y"}, "hilbert");
  const std::size_t dim = cfg.presentation.dim();
  cfg.hilbert.emplace(HilbertSection{domain_of(require(h, "domain", "hilbert"), dim, "hilbert.domain"),
                                     point_of(require(h, "x", "hilbert"), dim, "hilbert.x"),
                                     point_of(require(h, "y", "hilbert"), dim, "hilbert.y")});
}

void parse_synthesize(RunConfig& cfg, const json& root) {
  if (!root.contains("synthesize")) return;
  const json& s = root["synthesize"];
  check_keys(s, {"epsilon", "delta", "cover_radius", "domain_radius", "parabolic_radius", "cusp_depth",
                 "search_radius", "truncation", "margin", "boundary"},
             "synthesize");
  SynthesisParams p;
  auto real = [&](const char* key, double& slot) {
    if (s.contains(key)) slot = positive(s[key], std::string("synthesize.") + key);
  };
  auto whole = [&](const char* key, std::size_t& slot) {
    if (s.contains(key)) slot = count(s[key], std::string("synthesize.") + key);
  };
  real("epsilon", p.epsilon);
  real("delta", p.delta);
  real("cover_radius", p.cover_radius);
  real("domain_radius", p.domain_radius);
  real("parabolic_radius", p.parabolic_radius);
  real("margin", p.margin);
  whole("cusp_depth", p.cusp_depth);
  whole("search_radius", p.search_radius);
  whole("truncation", p.truncation);
  if (s.contains("boundary")) {
    const json& b = s["boundary"];
    if (!b.is_array()) bad("synthesize.boundary", "expected an array of [lo, width] arcs");
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string where = "synthesize.boundary[" + std::to_string(i) + "]";
      const Vec arc = sized(b[i], 2, where);
      if (!(arc[1] > 0.0) || arc[1] >= std::numbers::pi) bad(where, "width must lie in (0, pi)");
      p.boundary.push_back(Arc{arc[0], arc[1]});
    }
  }
  cfg.synthesize = p;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string config_hash(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("malformed JSON: ") + e.what());
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(root.dump())));
  return buf;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig cfg;
  cfg.source = source;
  cfg.hash = config_hash(text);
  const json root = json::parse(text);
  try {
    check_keys(root,
               {"description", "dimension", "free_model", "seed", "threads", "generators", "peripherals", "graph",
                "domains", "separation", "budgets", "tolerances", "probe", "gaps", "hilbert", "synthesize"},
               "config");
    if (root.contains("seed")) cfg.seed = count(root["seed"], "seed");
    if (root.contains("threads")) {
      cfg.threads = static_cast<unsigned>(count(root["threads"], "threads"));
      if (cfg.threads == 0) bad("threads", "must be positive");
    }
    parse_budgets(cfg, root);
    parse_tolerances(cfg, root);
    parse_presentation(cfg, root);
    parse_graph(cfg, root);
    parse_probe(cfg, root);
    parse_gaps(cfg, root);
    parse_hilbert(cfg, root);
    parse_synthesize(cfg, root);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(ErrorCode::ConfigError, std::string(to_string(e.code())) + ": " + e.what());
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("bad value: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace flagcert::cli
