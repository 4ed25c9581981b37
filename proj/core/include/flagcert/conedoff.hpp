#pragma once

// Truncated coned-off Cayley graphs: each peripheral coset gP is joined to
// a cone vertex by unit edges, so two elements of one coset are at
// distance at most 2.

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "flagcert/presentation.hpp"

namespace flagcert {

struct ConedOptions {
  /// Coned-distance truncation of the ball (or tube width in tube mode).
  std::size_t radius = 6;
  /// Cone hops reach g p for the first 2 * window peripheral elements p
  /// (|n| <= window for cyclic peripherals).
  std::size_t window = 16;
  std::size_t max_vertices = 1000000;
};

class ConedGraph {
 public:
  /// Elements within coned distance `options.radius` of the identity.
  ConedGraph(const GroupPresentation& pres, const ConedOptions& options);
  /// Union of coned balls of radius `options.radius` about the centers.
  ConedGraph(const GroupPresentation& pres, const std::vector<Word>& centers, const ConedOptions& options);

  std::size_t size() const noexcept { return words_.size(); }
  /// True when the vertex cap stopped the expansion early.
  bool truncated() const noexcept { return truncated_; }
  const Word& word(std::size_t v) const { return words_.at(v); }

  std::optional<std::size_t> find(const Word& w) const;
  /// Throws OutOfBall when w is not a vertex.
  std::size_t index(const Word& w) const;

  /// Shortest-path lengths inside the truncated graph from a set of
  /// sources; unreachable vertices get SIZE_MAX.
  std::vector<std::size_t> distances(const std::vector<std::size_t>& sources) const;

  /// Element vertices along a shortest path from a to b (cone vertices are
  /// implicit), or nullopt when b is unreachable inside the truncation.
  std::optional<std::vector<std::size_t>> geodesic(std::size_t a, std::size_t b) const;

 private:
  struct Edge {
    std::size_t to;
    std::size_t cost;
  };

  void grow(const std::vector<Word>& centers, std::size_t radius);
  std::string key_of(const Word& w, const Matrix& m) const;
  template <class F>
  void for_each_neighbor(std::size_t v, F&& f) const;

  const GroupPresentation* pres_;
  ConedOptions options_;
  std::vector<std::vector<Word>> windows_;
  std::vector<Word> words_;
  std::vector<Matrix> matrices_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<Edge>> adjacency_;
  bool truncated_ = false;
};

/// Coned distance between two elements inside the truncated ball; nullopt
/// when the truncation disconnects them.
std::optional<std::size_t> coned_distance(const ConedGraph& graph, const Word& a, const Word& b);

enum class QuasigeodesicMode { Ball, Tube };

struct QuasigeodesicOptions {
  QuasigeodesicMode mode = QuasigeodesicMode::Ball;
  ConedOptions coned;
  double d_max = 1.0;
};

struct QuasigeodesicReport {
  /// Hausdorff distance between the prefixes (with the identity) and a
  /// shortest path from the identity to the farthest prefix.
  double hausdorff = 0.0;
  std::size_t farthest = 0;
  std::size_t geodesic_length = 0;
  std::size_t graph_size = 0;
  std::vector<Word> geodesic;
  bool pass = false;
};

/// Tube mode searches for geodesics only near the prefixes, so its
/// distances are upper bounds for the full coned graph.
QuasigeodesicReport quasigeodesic_check(const GroupPresentation& pres, const std::vector<Word>& prefixes,
                                        const QuasigeodesicOptions& options = {});

}  // namespace flagcert
