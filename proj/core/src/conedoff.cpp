#include "flagcert/conedoff.hpp"

#include <algorithm>
#include <limits>

#include "flagcert/errors.hpp"

namespace flagcert {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// Shortest paths with edge costs 1 and 2 through a bucket queue.
template <class Adj>
std::vector<std::size_t> bucket_search(std::size_t n, const std::vector<std::size_t>& sources, Adj&& neighbors,
                                       std::vector<std::size_t>* parent = nullptr) {
  std::vector<std::size_t> dist(n, kUnreached);
  if (parent != nullptr) parent->assign(n, kUnreached);
  std::vector<std::vector<std::size_t>> buckets(1);
  for (std::size_t s : sources) {
    if (dist[s] == 0) continue;
    dist[s] = 0;
    buckets[0].push_back(s);
  }
  for (std::size_t d = 0; d < buckets.size(); ++d) {
    for (std::size_t i = 0; i < buckets[d].size(); ++i) {
      const std::size_t v = buckets[d][i];
      if (dist[v] != d) continue;
      neighbors(v, [&](std::size_t w, std::size_t cost) {
        const std::size_t nd = d + cost;
        if (nd >= dist[w]) return;
        dist[w] = nd;
        if (parent != nullptr) (*parent)[w] = v;
        if (buckets.size() <= nd) buckets.resize(nd + 1);
        buckets[nd].push_back(w);
      });
    }
  }
  return dist;
}

}  // namespace

ConedGraph::ConedGraph(const GroupPresentation& pres, const ConedOptions& options)
    : ConedGraph(pres, std::vector<Word>{Word{}}, options) {}

ConedGraph::ConedGraph(const GroupPresentation& pres, const std::vector<Word>& centers, const ConedOptions& options)
    : pres_(&pres), options_(options) {
  for (std::size_t i = 0; i < pres.peripherals().size(); ++i)
    windows_.push_back(pres.peripheral_elements(i, 2 * options.window));
  grow(centers, options.radius);
}

std::string ConedGraph::key_of(const Word& w, const Matrix& m) const {
  return pres_->free_model() ? pres_->element_key(w) : pres_->matrix_key(m);
}

template <class F>
void ConedGraph::for_each_neighbor(std::size_t v, F&& f) const {
  // Copies: the callback may grow words_ and matrices_.
  const Word w = words_[v];
  const Matrix m = matrices_[v];
  for (std::size_t g = 0; g < pres_->generators().size(); ++g) {
    for (int l : {static_cast<int>(g) + 1, -static_cast<int>(g) - 1}) {
      Word x = w;
      x.letters.push_back(l);
      f(reduce(std::move(x)), m * pres_->letter(l), std::size_t{1});
    }
  }
  for (const auto& window : windows_)
    for (const Word& p : window) f(concat(w, p), m * pres_->evaluate(p), std::size_t{2});
}

void ConedGraph::grow(const std::vector<Word>& centers, std::size_t radius) {
  std::vector<std::size_t> dist;
  std::vector<std::vector<std::size_t>> buckets(1);
  auto add = [&](Word w, Matrix m, std::size_t d) {
    const std::string key = key_of(w, m);
    auto it = index_.find(key);
    if (it == index_.end()) {
      if (words_.size() >= options_.max_vertices) {
        truncated_ = true;
        return;
      }
      const std::size_t id = words_.size();
      index_.emplace(key, id);
      words_.push_back(std::move(w));
      matrices_.push_back(std::move(m));
      dist.push_back(d);
      if (buckets.size() <= d) buckets.resize(d + 1);
      buckets[d].push_back(id);
    } else if (d < dist[it->second]) {
      const std::size_t id = it->second;
      words_[id] = std::move(w);
      dist[id] = d;
      buckets[d].push_back(id);
    }
  };
  for (const Word& c : centers) add(reduce(c), pres_->evaluate(c), 0);
  for (std::size_t d = 0; d < buckets.size(); ++d) {
    for (std::size_t i = 0; i < buckets[d].size(); ++i) {
      const std::size_t v = buckets[d][i];
      if (dist[v] != d) continue;
      for_each_neighbor(v, [&](Word x, Matrix m, std::size_t cost) {
        if (d + cost <= radius) add(std::move(x), std::move(m), d + cost);
      });
    }
  }

  adjacency_.assign(words_.size(), {});
  for (std::size_t v = 0; v < words_.size(); ++v) {
    auto& adj = adjacency_[v];
    for_each_neighbor(v, [&](const Word& x, const Matrix& m, std::size_t cost) {
      auto it = index_.find(key_of(x, m));
      if (it == index_.end() || it->second == v) return;
      for (Edge& e : adj)
        if (e.to == it->second) {
          e.cost = std::min(e.cost, cost);
          return;
        }
      adj.push_back({it->second, cost});
    });
  }
}

std::optional<std::size_t> ConedGraph::find(const Word& w) const {
  auto it = index_.find(key_of(reduce(w), pres_->evaluate(w)));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ConedGraph::index(const Word& w) const {
  const auto v = find(w);
  if (!v) fail(ErrorCode::OutOfBall, "element " + pres_->format(w) + " lies outside the truncated coned graph");
  return *v;
}

std::vector<std::size_t> ConedGraph::distances(const std::vector<std::size_t>& sources) const {
  return bucket_search(size(), sources, [&](std::size_t v, auto&& relax) {
    for (const Edge& e : adjacency_[v]) relax(e.to, e.cost);
  });
}

std::optional<std::vector<std::size_t>> ConedGraph::geodesic(std::size_t a, std::size_t b) const {
  std::vector<std::size_t> parent;
  const std::vector<std::size_t> dist = bucket_search(
      size(), {a},
      [&](std::size_t v, auto&& relax) {
        for (const Edge& e : adjacency_[v]) relax(e.to, e.cost);
      },
      &parent);
  if (dist[b] == kUnreached) return std::nullopt;
  std::vector<std::size_t> path{b};
  while (path.back() != a) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::optional<std::size_t> coned_distance(const ConedGraph& graph, const Word& a, const Word& b) {
  const std::size_t ia = graph.index(a);
  const std::size_t ib = graph.index(b);
  const std::size_t d = graph.distances({ia})[ib];
  if (d == kUnreached) return std::nullopt;
  return d;
}

QuasigeodesicReport quasigeodesic_check(const GroupPresentation& pres, const std::vector<Word>& prefixes,
                                        const QuasigeodesicOptions& options) {
  std::vector<Word> points{Word{}};
  points.insert(points.end(), prefixes.begin(), prefixes.end());
  const ConedGraph graph = options.mode == QuasigeodesicMode::Ball ? ConedGraph(pres, options.coned)
                                                                   : ConedGraph(pres, points, options.coned);
  std::vector<std::size_t> ids;
  for (const Word& w : points) ids.push_back(graph.index(w));
  const std::size_t origin = ids.front();

  const std::vector<std::size_t> from_origin = graph.distances({origin});
  std::size_t far = origin;
  for (std::size_t v : ids) {
    if (from_origin[v] == kUnreached) fail(ErrorCode::OutOfBall, "prefix unreachable inside the truncated coned graph");
    if (from_origin[v] > from_origin[far]) far = v;
  }
  const std::vector<std::size_t> path = *graph.geodesic(origin, far);

  QuasigeodesicReport rep;
  rep.graph_size = graph.size();
  rep.geodesic_length = from_origin[far];
  rep.farthest = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), far) - ids.begin());
  for (std::size_t v : path) rep.geodesic.push_back(graph.word(v));

  std::size_t h = 0;
  const std::vector<std::size_t> to_path = graph.distances(path);
  for (std::size_t v : ids) h = std::max(h, to_path[v]);
  const std::vector<std::size_t> to_points = graph.distances(ids);
  for (std::size_t v : path) h = std::max(h, to_points[v]);
  rep.hausdorff = static_cast<double>(h);
  rep.pass = rep.hausdorff <= options.d_max;
  return rep;
}

}  // namespace flagcert
