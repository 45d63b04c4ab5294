#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "snm/errors.hpp"
#include "snm/rng.hpp"

namespace snm {

// Simple undirected graph. Vertices are 0..n-1; edges keep their insertion
// order, which is also the coordinate order of star vectors.
class Graph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  Graph() = default;
  explicit Graph(std::size_t vertex_count) : adjacency_(vertex_count) {}

  Graph(std::size_t vertex_count, const std::vector<Edge>& edges) : adjacency_(vertex_count) {
    for (const auto& [u, v] : edges) add_edge(u, v);
  }

  void add_edge(std::size_t u, std::size_t v) {
    detail::require(u < vertex_count() && v < vertex_count(),
                    "edge (" + std::to_string(u) + ", " + std::to_string(v) + ") references a missing vertex");
    detail::require(u != v, "self-loop at vertex " + std::to_string(u));
    detail::require(!adjacent(u, v), "duplicate edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
    adjacency_[u].insert(v);
    adjacency_[v].insert(u);
    edges_.emplace_back(u, v);
  }

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  bool adjacent(std::size_t u, std::size_t v) const { return adjacency_[u].count(v) != 0; }
  std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }
  const std::set<std::size_t>& neighbors(std::size_t v) const { return adjacency_[v]; }

  std::size_t min_degree() const {
    std::size_t best = vertex_count() == 0 ? 0 : degree(0);
    for (std::size_t v = 1; v < vertex_count(); ++v) best = std::min(best, degree(v));
    return best;
  }

  std::size_t max_degree() const {
    std::size_t best = 0;
    for (std::size_t v = 0; v < vertex_count(); ++v) best = std::max(best, degree(v));
    return best;
  }

  static Graph path(std::size_t n) {
    Graph g(n);
    for (std::size_t v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
    return g;
  }

  static Graph complete(std::size_t n) {
    Graph g(n);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) g.add_edge(u, v);
    return g;
  }

 private:
  std::vector<std::set<std::size_t>> adjacency_;
  std::vector<Edge> edges_;
};

// Barabasi-Albert preferential attachment. Starts from the complete graph on
// `seed_vertices` vertices (default attach + 1); every later vertex attaches
// `attach` edges to distinct existing vertices chosen with probability
// proportional to degree. Duplicate targets within one step are resampled.
inline Graph barabasi_albert(std::size_t n, std::size_t attach, std::uint64_t seed, std::size_t seed_vertices = 0) {
  if (seed_vertices == 0) seed_vertices = attach + 1;
  detail::require(attach >= 1, "attach must be at least 1");
  detail::require(seed_vertices >= attach + 1, "seed graph needs at least attach + 1 vertices");
  detail::require(n >= seed_vertices, "vertex count must be at least the seed graph size");

  Graph g(n);
  std::vector<std::size_t> endpoints;  // each vertex repeated deg(v) times
  for (std::size_t u = 0; u < seed_vertices; ++u)
    for (std::size_t v = u + 1; v < seed_vertices; ++v) {
      g.add_edge(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }

  RngStream rng({seed, 0});
  for (std::size_t v = seed_vertices; v < n; ++v) {
    std::vector<std::size_t> targets;
    while (targets.size() < attach) {
      const std::size_t t = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (std::size_t t : targets) {
      g.add_edge(v, t);
      endpoints.push_back(v);
      endpoints.push_back(t);
    }
  }
  return g;
}

}  // namespace snm
