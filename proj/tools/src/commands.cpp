#include "flagcert_cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "flagcert/dynamics.hpp"
#include "flagcert/errors.hpp"
#include "flagcert/synthesis.hpp"
#include "flagcert_cli/config.hpp"
#include "flagcert_cli/output.hpp"

namespace flagcert::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Context {
  RunConfig cfg;
  CommandOptions options;
  Provenance provenance;
  std::ostream& out;
  std::ostream& err;

  fs::path file(const std::string& name) const { return fs::path(options.out_dir) / name; }
  CertifyOptions certify_options() const {
    return {cfg.budgets.boundary_samples, cfg.tolerances.nesting, cfg.threads};
  }
  const GammaGraph& graph() const {
    if (!cfg.graph) fail(ErrorCode::ConfigError, "this command needs \"graph\" and \"domains\"");
    return *cfg.graph;
  }
  const CompatibleSystem& system() const {
    graph();
    return *cfg.system;
  }
};

// Text reports: one provenance comment, then "key = value" lines.
class Report {
 public:
  explicit Report(const Provenance& p) { text_ = "# " + p.line() + "\n"; }
  Report& add(const std::string& key, const std::string& value) {
    text_ += key + " = " + value + "\n";
    return *this;
  }
  Report& add(const std::string& key, double value) { return add(key, format_double(value)); }
  Report& add_count(const std::string& key, std::size_t value) { return add(key, std::to_string(value)); }
  Report& add_flag(const std::string& key, bool value) { return add(key, value ? "true" : "false"); }
  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
};

json provenance_json(const Provenance& p) {
  json budgets = json::object();
  for (const auto& [k, v] : p.budgets) budgets[k] = v;
  return {{"tool", std::string("flagcert ") + kToolVersion},
          {"command", p.command},
          {"config_hash", p.config_hash},
          {"seed", p.seed},
          {"budgets", budgets}};
}

// Keeps the hash on the first lines so stale-output checks find it.
std::string dump_with_header(const Provenance& p, json body) {
  json root = json::object();
  root["config_hash"] = p.config_hash;
  root["provenance"] = provenance_json(p);
  for (auto& [k, v] : body.items()) root[k] = v;
  return root.dump(2) + "\n";
}

std::string describe_record(const GammaGraph& graph, const GroupPresentation& pres, const CertificateRecord& r) {
  std::ostringstream s;
  s << "edge " << r.edge << " (" << graph.vertices()[r.from].id << " -> " << graph.vertices()[r.to].id
    << "), element " << (r.element.empty() ? "id" : pres.format(r.element)) << ", margin "
    << format_double(r.margin);
  return s.str();
}

json certificate_json(const Certificate& c, const GammaGraph& graph, const GroupPresentation& pres) {
  json records = json::array();
  for (const CertificateRecord& r : c.records)
    records.push_back({{"edge", r.edge},
                       {"from", graph.vertices()[r.from].id},
                       {"to", graph.vertices()[r.to].id},
                       {"element", pres.format(r.element)},
                       {"shell", r.shell},
                       {"margin", r.margin},
                       {"image_radius", r.image_radius},
                       {"samples", r.samples},
                       {"pass", r.pass}});
  json tails = json::array();
  for (const TailReport& t : c.tails)
    tails.push_back({{"edge", t.edge},
                     {"vertex", graph.vertices()[t.vertex].id},
                     {"shells_checked", t.shells_checked},
                     {"margins_nondecreasing", t.margins_nondecreasing},
                     {"radii_decreasing", t.radii_decreasing},
                     {"pass", t.pass},
                     {"note", "finite-prefix heuristic for a cofinite family, not a proof"}});
  json separation = json::array();
  for (const SeparationCheck& s : c.separation)
    separation.push_back({{"a", graph.vertices()[s.entry.a].id},
                          {"b", graph.vertices()[s.entry.b].id},
                          {"delta", s.entry.delta},
                          {"measured", s.measured},
                          {"ok", s.ok}});
  json first = nullptr;
  if (c.first_failure) first = describe_record(graph, pres, c.records[*c.first_failure]);
  return {{"pass", c.pass},         {"min_margin", c.min_margin}, {"epsilon", c.epsilon},
          {"budget", c.budget},     {"first_failure", first},     {"records", records},
          {"tails", tails},         {"separation", separation}};
}

Certificate certify(Context& ctx) {
  return verify_compatibility(ctx.graph(), ctx.system(), ctx.cfg.presentation, ctx.certify_options());
}

std::string failure_summary(const Context& ctx, const Certificate& c) {
  if (c.first_failure) return describe_record(ctx.graph(), ctx.cfg.presentation, c.records[*c.first_failure]);
  for (const TailReport& t : c.tails)
    if (!t.pass) return "tail heuristic failed on edge " + std::to_string(t.edge);
  for (const SeparationCheck& s : c.separation)
    if (!s.ok)
      return "separation " + ctx.graph().vertices()[s.entry.a].id + "/" + ctx.graph().vertices()[s.entry.b].id +
             " below declared delta";
  return "unknown";
}

// Sampling commands refuse uncertified systems unless told otherwise.
bool gate(Context& ctx) {
  if (ctx.options.skip_certify) {
    ctx.err << "warning: certification skipped; results are not backed by a certificate\n";
    return true;
  }
  const Certificate c = certify(ctx);
  if (c.pass) return true;
  ctx.err << "refusing to run on an uncertified system (" << failure_summary(ctx, c)
          << "); pass --skip-certify to override\n";
  return false;
}

int cmd_certify(Context& ctx) {
  ctx.provenance.budgets = {{"boundary_samples", std::to_string(ctx.cfg.budgets.boundary_samples)},
                            {"epsilon", format_double(ctx.graph().epsilon())}};
  const Certificate c = certify(ctx);
  const auto witnesses = check_divergence(ctx.graph(), ctx.system(), ctx.cfg.presentation,
                                          ctx.cfg.budgets.boundary_samples);
  std::size_t found = 0;
  for (const auto& w : witnesses) found += w.found ? 1 : 0;

  write_file(ctx.file("certificate.json"),
             dump_with_header(ctx.provenance, certificate_json(c, ctx.graph(), ctx.cfg.presentation)));
  Report r(ctx.provenance);
  r.add("verdict", c.pass ? "PASS" : "FAIL")
      .add_count("vertices", ctx.graph().size())
      .add_count("edges", ctx.graph().edges().size())
      .add_count("records", c.records.size())
      .add("min_margin", c.min_margin)
      .add("epsilon", c.epsilon)
      .add_count("tails", c.tails.size())
      .add_count("divergence_witnesses", found);
  if (!c.pass) r.add("first_failure", failure_summary(ctx, c));
  write_file(ctx.file("certify_report.txt"), r.text());

  ctx.out << (c.pass ? "PASS" : "FAIL") << " min_margin=" << format_double(c.min_margin)
          << " records=" << c.records.size() << '\n';
  if (!c.pass) ctx.out << "first failure: " << failure_summary(ctx, c) << '\n';
  return c.pass ? kPass : kFail;
}

int cmd_limitset(Context& ctx) {
  const Budgets& b = ctx.cfg.budgets;
  ctx.provenance.budgets = {{"cloud_paths", std::to_string(b.cloud_paths)},
                            {"cloud_depth", std::to_string(b.cloud_depth)}};
  if (!gate(ctx)) return kFail;
  const LimitSetCloud cloud = limit_set_sample(ctx.graph(), ctx.cfg.presentation, ctx.system(), b.cloud_depth,
                                               b.cloud_paths, ctx.cfg.seed, ctx.cfg.threads);
  const std::size_t dim = ctx.cfg.presentation.dim();
  std::vector<std::string> columns;
  for (std::size_t i = 0; i < dim; ++i) columns.push_back("x" + std::to_string(i));
  columns.push_back("path_code");
  columns.push_back("radius_bound");
  CsvWriter csv(ctx.provenance, columns);
  for (const CloudPoint& p : cloud.points) {
    std::vector<std::string> cells;
    for (double x : p.point.coords()) cells.push_back(csv_number(x));
    cells.push_back(p.code);
    cells.push_back(csv_number(p.radius));
    csv.row(cells);
  }
  write_file(ctx.file("limitset.csv"), csv.text());
  if (ctx.options.svg) {
    if (dim > 3)
      ctx.err << "warning: no SVG for d > 3\n";
    else
      write_file(ctx.file("limitset.svg"), render_svg(cloud, ctx.provenance));
  }
  double worst = 0.0;
  for (const CloudPoint& p : cloud.points) worst = std::max(worst, p.radius);
  ctx.out << "points=" << cloud.points.size() << " max_radius_bound=" << format_double(worst) << '\n';
  return kPass;
}

int cmd_rates(Context& ctx) {
  const Budgets& b = ctx.cfg.budgets;
  ctx.provenance.budgets = {{"paths", std::to_string(b.paths)},
                            {"depth", std::to_string(b.depth)},
                            {"depth_min", std::to_string(b.depth_min)}};
  if (!gate(ctx)) return kFail;
  PathOptions po;
  po.strategy = PathStrategy::Random;
  po.count = b.paths;
  po.seed = ctx.cfg.seed;
  const PathEnumeration paths = enumerate_paths(ctx.graph(), b.depth + 1, po);
  LimitOptions lo;
  lo.tolerance = ctx.cfg.tolerances.convergence;
  lo.gaps = false;
  const RateReport rate = shrink_rates(paths.paths, ctx.graph(), ctx.cfg.presentation, ctx.system(), b.depth,
                                       b.depth_min, lo, ctx.cfg.threads);
  Report r(ctx.provenance);
  r.add("verdict", rate.accepted ? "ACCEPTED" : "REJECTED")
      .add("lambda1", rate.lambda1)
      .add("lambda2", rate.lambda2)
      .add("r_squared", rate.r_squared)
      .add("min_r_squared", kMinRSquared)
      .add_count("depth_min", rate.depth_min)
      .add_count("depth_max", rate.depth_max)
      .add_count("points", rate.points);
  write_file(ctx.file("rates_report.txt"), r.text());
  ctx.out << (rate.accepted ? "ACCEPTED" : "REJECTED") << " lambda1=" << format_double(rate.lambda1)
          << " lambda2=" << format_double(rate.lambda2) << " r_squared=" << format_double(rate.r_squared) << '\n';
  return rate.accepted ? kPass : kFail;
}

int cmd_probe(Context& ctx) {
  if (!ctx.cfg.probe) fail(ErrorCode::ConfigError, "probe needs a \"probe\" section");
  const ProbeSection& p = *ctx.cfg.probe;
  ctx.provenance.budgets = {{"boundary_samples", std::to_string(ctx.cfg.budgets.boundary_samples)},
                            {"grid_points", std::to_string(p.t_grid.size())}};
  const ProbeResult res = peripheral_stability_probe(ctx.cfg.presentation, p.families, p.t_grid, ctx.graph(),
                                                     ctx.system(), ctx.certify_options());
  CsvWriter csv(ctx.provenance, {"t", "pass", "min_margin", "first_failing_record"});
  for (const ProbeStep& s : res.steps)
    csv.row({csv_number(s.t), s.pass ? "1" : "0", csv_number(s.min_margin),
             s.first_failure ? std::to_string(*s.first_failure) : ""});
  write_file(ctx.file("probe.csv"), csv.text());
  Report r(ctx.provenance);
  r.add("verdict", res.first_failing_t ? "UNSTABLE" : "STABLE");
  if (res.first_failing_t) r.add("first_failing_t", *res.first_failing_t);
  for (std::size_t e = 0; e < res.first_fail_per_edge.size(); ++e)
    if (res.first_fail_per_edge[e]) r.add("edge_" + std::to_string(e) + "_first_failing_t", *res.first_fail_per_edge[e]);
  write_file(ctx.file("probe_report.txt"), r.text());
  if (res.first_failing_t)
    ctx.out << "UNSTABLE first_failing_t=" << format_double(*res.first_failing_t) << '\n';
  else
    ctx.out << "STABLE over " << res.steps.size() << " grid points\n";
  return res.first_failing_t ? kFail : kPass;
}

json word_json(const GroupPresentation& pres, const Word& w) { return pres.format(w); }

// The synthesized automaton as a config that `certify` accepts.
json synthesized_config(const Context& ctx, const SynthesisResult& s) {
  const GroupPresentation& pres = ctx.cfg.presentation;
  json gens = json::array();
  for (const Generator& g : pres.generators()) {
    json rows = json::array();
    for (std::size_t i = 0; i < g.matrix.dim(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < g.matrix.dim(); ++j) row.push_back(g.matrix(i, j));
      rows.push_back(row);
    }
    gens.push_back({{"name", g.name}, {"matrix", rows}});
  }
  json peripherals = json::array();
  for (const Peripheral& p : pres.peripherals()) {
    json names = json::array();
    for (std::size_t g : p.generators) names.push_back(pres.generators()[g].name);
    peripherals.push_back({{"name", p.name}, {"generators", names}, {"truncation", p.truncation},
                           {"abelian", p.abelian}});
  }
  json vertices = json::array();
  json domains = json::object();
  for (std::size_t v = 0; v < s.graph.size(); ++v) {
    const GraphVertex& gv = s.graph.vertices()[v];
    if (const auto* sl = std::get_if<SingletonLabel>(&gv.label)) {
      vertices.push_back({{"id", gv.id}, {"word", word_json(pres, sl->word)}});
    } else {
      const auto& pl = std::get<ParabolicLabel>(gv.label);
      json excluded = json::array();
      for (const Word& w : pl.excluded) excluded.push_back(word_json(pres, w));
      vertices.push_back({{"id", gv.id},
                          {"coset", word_json(pres, pl.coset)},
                          {"peripheral", pres.peripherals()[pl.peripheral].name},
                          {"excluded", excluded},
                          {"truncation", pl.truncation}});
    }
    const Arc& a = s.vertices[v].domain;
    domains[gv.id] = {{"fs_ball", {{"center", {std::cos(a.center()), std::sin(a.center())}}, {"radius", 0.5 * a.width}}}};
  }
  json edges = json::array();
  for (const GraphEdge& e : s.graph.edges())
    edges.push_back({s.graph.vertices()[e.from].id, s.graph.vertices()[e.to].id});
  return {{"description", "synthesized by flagcert " + std::string(kToolVersion) +
                              " from config_hash=" + ctx.cfg.hash},
          {"dimension", pres.dim()},
          {"free_model", pres.free_model()},
          {"generators", gens},
          {"peripherals", peripherals},
          {"graph", {{"epsilon", s.graph.epsilon()}, {"vertices", vertices}, {"edges", edges}}},
          {"domains", domains},
          {"budgets", {{"boundary_samples", ctx.cfg.budgets.boundary_samples}}}};
}

int cmd_synthesize(Context& ctx) {
  const SynthesisParams params = ctx.cfg.synthesize.value_or(SynthesisParams{});
  ctx.provenance.budgets = {{"search_radius", std::to_string(params.search_radius)},
                            {"cusp_depth", std::to_string(params.cusp_depth)},
                            {"truncation", std::to_string(params.truncation)}};
  const SynthesisResult s = synthesize_rp1(ctx.cfg.presentation, params);
  std::size_t parabolic = 0;
  for (const SynthesizedVertex& v : s.vertices) parabolic += v.parabolic ? 1 : 0;

  Report r(ctx.provenance);
  r.add_count("vertices", s.graph.size())
      .add_count("parabolic_vertices", parabolic)
      .add_count("edges", s.graph.edges().size())
      .add_count("words_searched", s.words_searched);
  bool pass = true;
  if (!ctx.options.skip_certify) {
    const Certificate c = verify_compatibility(s.graph, s.system, ctx.cfg.presentation, ctx.certify_options());
    pass = c.pass;
    r.add("verdict", c.pass ? "PASS" : "FAIL").add("min_margin", c.min_margin);
    if (c.first_failure) r.add("first_failure", describe_record(s.graph, ctx.cfg.presentation, c.records[*c.first_failure]));
  }
  for (const SynthesizedVertex& v : s.vertices)
    r.add("vertex " + v.id, std::string(v.parabolic ? "parabolic" : "conical") + " point=" + format_double(v.point) +
                                " word=" + (v.word.empty() ? "id" : ctx.cfg.presentation.format(v.word)) +
                                (v.parabolic ? " n0=" + std::to_string(v.n0) : ""));
  write_file(ctx.file("synthesize_report.txt"), r.text());
  write_file(ctx.file("synthesized.json"), synthesized_config(ctx, s).dump(2) + "\n");
  ctx.out << (pass ? "PASS" : "FAIL") << " vertices=" << s.graph.size() << " parabolic=" << parabolic
          << " edges=" << s.graph.edges().size() << '\n';
  return pass ? kPass : kFail;
}

int cmd_gaps(Context& ctx) {
  if (!ctx.cfg.gaps) fail(ErrorCode::ConfigError, "gaps needs a \"gaps\" section");
  const GapsSection& g = *ctx.cfg.gaps;
  ctx.provenance.budgets = {{"k", std::to_string(g.k)},
                            {"threshold", format_double(g.threshold)},
                            {"length", std::to_string(g.sequence.size())}};
  const GapTrace trace = gap_trace(g.sequence, g.k, g.threshold);
  CsvWriter csv(ctx.provenance, {"index", "gap"});
  for (std::size_t i = 0; i < trace.values.size(); ++i) csv.row({std::to_string(i), csv_number(trace.values[i])});
  write_file(ctx.file("gaps.csv"), csv.text());
  Report r(ctx.provenance);
  r.add("verdict", trace.divergent ? "DIVERGENT" : "NOT_DIVERGENT").add("last_gap", trace.values.back());
  write_file(ctx.file("gaps_report.txt"), r.text());
  ctx.out << (trace.divergent ? "DIVERGENT" : "NOT_DIVERGENT") << " last_gap=" << format_double(trace.values.back())
          << '\n';
  return trace.divergent ? kPass : kFail;
}

int cmd_hilbert(Context& ctx) {
  if (!ctx.cfg.hilbert) fail(ErrorCode::ConfigError, "hilbert needs a \"hilbert\" section");
  const HilbertSection& h = *ctx.cfg.hilbert;
  ctx.provenance.budgets = {{"pair_samples", std::to_string(ctx.cfg.budgets.pair_samples)}};
  if (!h.domain.contains(h.x) || !h.domain.contains(h.y))
    fail(ErrorCode::NotInDomain, "hilbert: both points must lie in the domain");
  const double d = zimmer_metric(h.domain, h.x, h.y, ctx.cfg.budgets.pair_samples);
  Report r(ctx.provenance);
  r.add("distance", d).add_flag("exact", h.domain.is_exact());
  write_file(ctx.file("hilbert_report.txt"), r.text());
  ctx.out << format_double(d) << '\n';
  return kPass;
}

bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidGraph:
    case ErrorCode::InvalidDomain:
    case ErrorCode::MissingDomain:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotInDomain:
    case ErrorCode::NotInChart:
    case ErrorCode::BadOrder:
      return true;
    default:
      return false;
  }
}

const std::map<std::string, std::function<int(Context&)>, std::less<>>& table() {
  static const std::map<std::string, std::function<int(Context&)>, std::less<>> t = {
      {"certify", cmd_certify}, {"limitset", cmd_limitset},     {"rates", cmd_rates}, {"probe", cmd_probe},
      {"synthesize", cmd_synthesize}, {"gaps", cmd_gaps}, {"hilbert", cmd_hilbert}};
  return t;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"certify", "limitset", "rates", "probe",
                                                 "synthesize", "gaps", "hilbert"};
  return names;
}

int run_command(std::string_view name, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  const auto it = table().find(name);
  if (it == table().end()) {
    err << "error: unknown command " << name << '\n';
    return kUsage;
  }
  try {
    RunConfig cfg = load_config(options.config_path);
    if (options.seed) cfg.seed = *options.seed;
    if (options.threads) cfg.threads = std::max(1u, *options.threads);
    Context ctx{std::move(cfg), options, {}, out, err};
    ctx.provenance.command = std::string(name);
    ctx.provenance.config_hash = ctx.cfg.hash;
    ctx.provenance.seed = ctx.cfg.seed;
    return it->second(ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_input_error(e.code()) ? kUsage : kFail;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFail;
  }
}

}  // namespace flagcert::cli
