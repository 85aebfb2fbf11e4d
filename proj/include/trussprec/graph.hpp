#pragma once

#include <cstdint>
#include <deque>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "trussprec/error.hpp"

namespace trussprec {

struct GraphEdge {
  int u = 0;
  int v = 0;
};

struct Incidence {
  int neighbor;
  int edge;
};

/// Simple undirected multigraph with stable edge ids and compressed incidence lists.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;

  UndirectedGraph(int vertex_count, std::vector<GraphEdge> edges)
      : n_(vertex_count), edges_(std::move(edges)) {
    offsets_.assign(n_ + 1, 0);
    for (const auto& e : edges_) {
      if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_ || e.u == e.v)
        throw Error(ErrorCode::kInvalidInput, "graph edge endpoint out of range or self loop");
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    incidence_.resize(offsets_[n_]);
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (int id = 0; id < static_cast<int>(edges_.size()); ++id) {
      const auto& e = edges_[id];
      incidence_[fill[e.u]++] = {e.v, id};
      incidence_[fill[e.v]++] = {e.u, id};
    }
  }

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const GraphEdge& edge(int id) const { return edges_[id]; }
  std::span<const GraphEdge> edges() const { return edges_; }

  std::span<const Incidence> incident(int v) const {
    return {incidence_.data() + offsets_[v], incidence_.data() + offsets_[v + 1]};
  }
  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }

  int other(int id, int v) const { return edges_[id].u == v ? edges_[id].v : edges_[id].u; }

 private:
  int n_ = 0;
  std::vector<GraphEdge> edges_;
  std::vector<int> offsets_;
  std::vector<Incidence> incidence_;
};

class DisjointSets {
 public:
  explicit DisjointSets(int n = 0) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  int size() const { return static_cast<int>(parent_.size()); }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

/// Hop distances from source; -1 for unreachable vertices. When allowed is
/// non-empty only vertices with allowed[v] != 0 are visited.
inline std::vector<int> bfs_distances(const UndirectedGraph& g, int source,
                                      std::span<const char> allowed = {}) {
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (auto [w, e] : g.incident(v)) {
      if (dist[w] >= 0) continue;
      if (!allowed.empty() && !allowed[w]) continue;
      dist[w] = dist[v] + 1;
      queue.push_back(w);
    }
  }
  return dist;
}

/// Edge ids of a shortest path from source to target inside the allowed
/// vertex set, ordered from source. Empty when source == target.
inline std::vector<int> shortest_path_edges(const UndirectedGraph& g, int source, int target,
                                            std::span<const char> allowed = {}) {
  std::vector<int> via(g.vertex_count(), -2);
  std::deque<int> queue{source};
  via[source] = -1;
  while (!queue.empty() && via[target] == -2) {
    int v = queue.front();
    queue.pop_front();
    for (auto [w, e] : g.incident(v)) {
      if (via[w] != -2) continue;
      if (!allowed.empty() && !allowed[w]) continue;
      via[w] = e;
      queue.push_back(w);
    }
  }
  if (via[target] == -2) throw Error(ErrorCode::kNotConnected, "no path between graph vertices");
  std::vector<int> path;
  for (int v = target; v != source; v = g.other(via[v], v)) path.push_back(via[v]);
  return {path.rbegin(), path.rend()};
}

inline int count_components(const UndirectedGraph& g, std::span<const int> edge_ids) {
  DisjointSets sets(g.vertex_count());
  int components = g.vertex_count();
  for (int e : edge_ids)
    if (sets.unite(g.edge(e).u, g.edge(e).v)) --components;
  return components;
}

inline bool is_connected(const UndirectedGraph& g) {
  if (g.vertex_count() == 0) return false;
  std::vector<int> all(g.edge_count());
  std::iota(all.begin(), all.end(), 0);
  return count_components(g, all) == 1;
}

inline std::uint64_t pair_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace trussprec
