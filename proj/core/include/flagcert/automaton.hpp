#pragma once

// Gamma-graphs, compatible systems of open sets and the sampled ping-pong
// certifier.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flagcert/domains.hpp"
#include "flagcert/presentation.hpp"

namespace flagcert {

struct SingletonLabel {
  Word word;
};

/// Cofinite subset of the coset `coset` * P of a peripheral subgroup P.
struct ParabolicLabel {
  Word coset;
  std::size_t peripheral = 0;
  std::vector<Word> excluded;
  /// Overrides the peripheral truncation when nonzero.
  std::size_t truncation = 0;
};

using VertexLabel = std::variant<SingletonLabel, ParabolicLabel>;

struct GraphVertex {
  std::string id;
  VertexLabel label;
};

struct GraphEdge {
  std::size_t from = 0;
  std::size_t to = 0;
};

class GammaGraph {
 public:
  GammaGraph(const GroupPresentation& pres, std::vector<GraphVertex> vertices, std::vector<GraphEdge> edges,
             double epsilon);

  const std::vector<GraphVertex>& vertices() const noexcept { return vertices_; }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t size() const noexcept { return vertices_.size(); }

  std::size_t index_of(std::string_view id) const;
  bool is_parabolic(std::size_t v) const { return std::holds_alternative<ParabolicLabel>(vertices_[v].label); }

  /// Truncated element enumeration of T_v.
  const std::vector<Word>& elements(std::size_t v) const { return elements_.at(v); }
  /// Shell index of each enumerated element (1 for singletons).
  const std::vector<std::size_t>& shells(std::size_t v) const { return shells_.at(v); }
  /// Targets of outgoing edges, in edge order.
  const std::vector<std::size_t>& successors(std::size_t v) const { return successors_.at(v); }

 private:
  std::vector<GraphVertex> vertices_;
  std::vector<GraphEdge> edges_;
  double epsilon_;
  std::vector<std::vector<Word>> elements_;
  std::vector<std::vector<std::size_t>> shells_;
  std::vector<std::vector<std::size_t>> successors_;
};

struct SeparationEntry {
  std::size_t a = 0;
  std::size_t b = 0;
  double delta = 0.0;
};

struct SeparationCheck {
  SeparationEntry entry;
  double measured = 0.0;
  bool ok = false;
};

/// Smallest sampled Fubini-Study distance between the closures, or 0 when
/// they meet.
double domain_gap(const ProperDomain& a, const ProperDomain& b, std::size_t budget = 512);

class CompatibleSystem {
 public:
  CompatibleSystem(std::vector<ProperDomain> domains, std::vector<SeparationEntry> separation = {});

  const std::vector<ProperDomain>& domains() const noexcept { return domains_; }
  const ProperDomain& domain(std::size_t v) const;
  const std::vector<SeparationEntry>& separation() const noexcept { return separation_; }

  std::vector<SeparationCheck> check_separation(std::size_t budget = 512) const;

  /// 0.1 times the smallest pairwise gap between the domains.
  double default_epsilon(std::size_t budget = 512) const;

 private:
  std::vector<ProperDomain> domains_;
  std::vector<SeparationEntry> separation_;
};

struct CertificateRecord {
  std::size_t edge = 0;
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t element_index = 0;
  std::size_t shell = 1;
  Word element;
  double margin = 0.0;
  /// Largest FS distance from the image of the target center to the image
  /// of a sample; a proxy for the image radius.
  double image_radius = 0.0;
  std::size_t samples = 0;
  bool pass = false;
};

/// Finite-prefix evidence for a cofinite family; never a proof.
struct TailReport {
  std::size_t edge = 0;
  std::size_t vertex = 0;
  std::size_t shells_checked = 0;
  bool margins_nondecreasing = false;
  bool radii_decreasing = false;
  bool pass = false;
};

struct Certificate {
  std::vector<CertificateRecord> records;
  std::vector<TailReport> tails;
  std::vector<SeparationCheck> separation;
  double min_margin = 0.0;
  std::optional<std::size_t> first_failure;
  double epsilon = 0.0;
  std::size_t budget = 0;
  bool pass = false;
};

struct CertifyOptions {
  std::size_t budget = 256;
  double tolerance = 1e-9;
  unsigned threads = 1;
};

Certificate verify_compatibility(const GammaGraph& graph, const CompatibleSystem& system, const GroupPresentation& pres,
                                 const CertifyOptions& options = {});

struct DivergenceWitness {
  std::size_t edge = 0;
  bool found = false;
  Vec witness;
  double depth = 0.0;
};

/// For each edge (v, w) and the first element a of T_v, searches for a
/// point of U_v whose preimage under rho(a) lies outside the closure of
/// U_w. Missing witnesses are inconclusive rather than failures.
std::vector<DivergenceWitness> check_divergence(const GammaGraph& graph, const CompatibleSystem& system,
                                                const GroupPresentation& pres, std::size_t budget = 512);

/// rho_t(generator) = C (base * expm(t X))^power C^{-1}.
struct FamilyPath {
  std::string generator;
  Matrix base;
  Matrix deform;
  int power = 1;
  Matrix conjugator;
};

struct ProbeStep {
  double t = 0.0;
  bool pass = false;
  double min_margin = 0.0;
  std::optional<std::size_t> first_failure;
};

struct ProbeResult {
  std::vector<ProbeStep> steps;
  /// Per edge, the first grid value at which a record of that edge fails.
  std::vector<std::optional<double>> first_fail_per_edge;
  std::optional<double> first_failing_t;
};

GroupPresentation family_at(const GroupPresentation& base, const std::vector<FamilyPath>& paths, double t);

ProbeResult peripheral_stability_probe(const GroupPresentation& base, const std::vector<FamilyPath>& paths,
                                       const std::vector<double>& t_grid, const GammaGraph& graph,
                                       const CompatibleSystem& system, const CertifyOptions& options = {});

struct GPath {
  std::vector<std::size_t> vertices;
  std::vector<std::size_t> element_indices;
  std::string code;

  std::size_t size() const noexcept { return vertices.size(); }
};

enum class PathStrategy { Exhaustive, Random, Spine };

struct PathOptions {
  PathStrategy strategy = PathStrategy::Exhaustive;
  std::size_t cap = 100000;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  std::vector<std::size_t> spine;
};

struct PathEnumeration {
  std::vector<GPath> paths;
  bool truncated = false;
};

/// Paths of `depth` vertices v_1 .. v_depth with one element of each T_v.
PathEnumeration enumerate_paths(const GammaGraph& graph, std::size_t depth, const PathOptions& options = {});

std::string path_code(const GammaGraph& graph, const std::vector<std::size_t>& vertices,
                      const std::vector<std::size_t>& element_indices);

/// Word of the i-th element along a path.
const Word& path_element(const GammaGraph& graph, const GPath& path, std::size_t i);

}  // namespace flagcert
