#pragma once

// Run configuration: a JSON document (schema in configs/schema.json)
// parsed into a presentation, an optional Gamma-graph with its domains,
// and per-command sections.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flagcert/automaton.hpp"
#include "flagcert/synthesis.hpp"

namespace flagcert::cli {

struct Budgets {
  std::size_t boundary_samples = 256;
  std::size_t pair_samples = 10000;
  std::size_t paths = 100;
  std::size_t depth = 20;
  std::size_t depth_min = 2;
  std::size_t cloud_paths = 2000;
  std::size_t cloud_depth = 20;
};

struct Tolerances {
  double incidence = 1e-10;
  double opposition = 1e-6;
  double nesting = 1e-9;
  double convergence = 1e-9;
};

struct ProbeSection {
  std::vector<double> t_grid;
  std::vector<FamilyPath> families;
};

struct GapsSection {
  std::vector<Matrix> sequence;
  std::size_t k = 1;
  double threshold = 5.0;
};

struct HilbertSection {
  ProperDomain domain;
  ProjPoint x;
  ProjPoint y;
};

struct RunConfig {
  std::string source;
  /// FNV-1a of the canonical serialization, 16 hex digits.
  std::string hash;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  GroupPresentation presentation;
  std::optional<GammaGraph> graph;
  std::optional<CompatibleSystem> system;
  Budgets budgets;
  Tolerances tolerances;

  std::optional<ProbeSection> probe;
  std::optional<GapsSection> gaps;
  std::optional<HilbertSection> hilbert;
  std::optional<SynthesisParams> synthesize;
};

/// Throws Error(ConfigError) naming the offending key; errors from the
/// core constructors are rethrown as ConfigError as well.
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

/// Hash of the canonical form, so whitespace and key order do not matter.
std::string config_hash(const std::string& text);

}  // namespace flagcert::cli
