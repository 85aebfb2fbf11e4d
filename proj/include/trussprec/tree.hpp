#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "trussprec/error.hpp"
#include "trussprec/graph.hpp"

namespace trussprec {

/// Spanning tree of a host graph, rooted, with O(1) LCA queries.
class RootedTree {
 public:
  RootedTree() = default;

  RootedTree(const UndirectedGraph& host, std::span<const int> tree_edges, int root = 0)
      : tree_edges_(tree_edges.begin(), tree_edges.end()), root_(root) {
    const int n = host.vertex_count();
    if (n == 0) throw Error(ErrorCode::kNotSpanning, "empty host graph");
    if (static_cast<int>(tree_edges_.size()) != n - 1)
      throw Error(ErrorCode::kNotSpanning, "tree needs exactly n - 1 edges");
    in_tree_.assign(host.edge_count(), 0);
    std::vector<std::vector<Incidence>> adj(n);
    for (int e : tree_edges_) {
      if (e < 0 || e >= host.edge_count()) throw Error(ErrorCode::kNotSpanning, "tree edge id");
      if (in_tree_[e]) throw Error(ErrorCode::kNotSpanning, "repeated tree edge");
      in_tree_[e] = 1;
      adj[host.edge(e).u].push_back({host.edge(e).v, e});
      adj[host.edge(e).v].push_back({host.edge(e).u, e});
    }

    parent_.assign(n, -1);
    parent_edge_.assign(n, -1);
    depth_.assign(n, -1);
    children_.assign(n, {});
    depth_[root_] = 0;
    std::deque<int> queue{root_};
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      bfs_order_.push_back(v);
      for (auto [w, e] : adj[v]) {
        if (depth_[w] >= 0) continue;
        depth_[w] = depth_[v] + 1;
        parent_[w] = v;
        parent_edge_[w] = e;
        children_[v].push_back(w);
        queue.push_back(w);
      }
    }
    if (static_cast<int>(bfs_order_.size()) != n)
      throw Error(ErrorCode::kNotSpanning, "tree edges do not span the host graph");
    build_lca();
  }

  int vertex_count() const { return static_cast<int>(parent_.size()); }
  int root() const { return root_; }
  int parent(int v) const { return parent_[v]; }
  int parent_edge(int v) const { return parent_edge_[v]; }
  int depth(int v) const { return depth_[v]; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  std::span<const int> tree_edges() const { return tree_edges_; }
  bool is_tree_edge(int e) const { return in_tree_[e] != 0; }
  std::span<const int> bfs_order() const { return bfs_order_; }

  int lca(int u, int v) const {
    int a = first_[u], b = first_[v];
    if (a > b) std::swap(a, b);
    int level = log2_[b - a + 1];
    int x = table_[level][a], y = table_[level][b - (1 << level) + 1];
    return depth_[x] < depth_[y] ? x : y;
  }

  int distance(int u, int v) const { return depth_[u] + depth_[v] - 2 * depth_[lca(u, v)]; }

  /// Tree edges on the path from u to v, in walking order.
  std::vector<int> path_edges(int u, int v) const {
    int w = lca(u, v);
    std::vector<int> up, down;
    for (int x = u; x != w; x = parent_[x]) up.push_back(parent_edge_[x]);
    for (int x = v; x != w; x = parent_[x]) down.push_back(parent_edge_[x]);
    up.insert(up.end(), down.rbegin(), down.rend());
    return up;
  }

 private:
  void build_lca() {
    const int n = vertex_count();
    first_.assign(n, -1);
    euler_.clear();
    euler_.reserve(2 * n);
    // iterative Euler tour
    std::vector<std::pair<int, size_t>> stack{{root_, 0}};
    first_[root_] = 0;
    euler_.push_back(root_);
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < children_[v].size()) {
        int c = children_[v][next++];
        first_[c] = static_cast<int>(euler_.size());
        euler_.push_back(c);
        stack.push_back({c, 0});
      } else {
        stack.pop_back();
        if (!stack.empty()) euler_.push_back(stack.back().first);
      }
    }
    const int len = static_cast<int>(euler_.size());
    log2_.assign(len + 1, 0);
    for (int i = 2; i <= len; ++i) log2_[i] = log2_[i / 2] + 1;
    table_.assign(log2_[len] + 1, {});
    table_[0] = euler_;
    for (int level = 1; level < static_cast<int>(table_.size()); ++level) {
      const int span = 1 << level;
      table_[level].resize(len - span + 1);
      for (int i = 0; i + span <= len; ++i) {
        int x = table_[level - 1][i], y = table_[level - 1][i + span / 2];
        table_[level][i] = depth_[x] < depth_[y] ? x : y;
      }
    }
  }

  std::vector<int> tree_edges_;
  std::vector<char> in_tree_;
  int root_ = 0;
  std::vector<int> parent_, parent_edge_, depth_, bfs_order_;
  std::vector<std::vector<int>> children_;
  std::vector<int> euler_, first_, log2_;
  std::vector<std::vector<int>> table_;
};

/// Sum over host edges of the tree distance between their endpoints.
inline std::int64_t tree_stretch(const UndirectedGraph& host, const RootedTree& tree) {
  std::int64_t total = 0;
  for (const auto& e : host.edges()) total += tree.distance(e.u, e.v);
  return total;
}

inline std::int64_t tree_stretch(const UndirectedGraph& host, std::span<const int> tree_edges) {
  return tree_stretch(host, RootedTree(host, tree_edges));
}

inline std::vector<int> bfs_tree(const UndirectedGraph& g, int root) {
  std::vector<int> via(g.vertex_count(), -2), edges;
  via[root] = -1;
  std::deque<int> queue{root};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (auto [w, e] : g.incident(v)) {
      if (via[w] != -2) continue;
      via[w] = e;
      edges.push_back(e);
      queue.push_back(w);
    }
  }
  if (static_cast<int>(edges.size()) != g.vertex_count() - 1)
    throw Error(ErrorCode::kDisconnected, "graph is not connected");
  return edges;
}

namespace detail {

// Recursive ball/cone partitioning: a ball around the centre, then cones grown
// from the frontier, each attached to what is already assigned by one bridge.
class StarDecomposition {
 public:
  explicit StarDecomposition(const UndirectedGraph& g)
      : g_(g), piece_(g.vertex_count(), 0), dist_(g.vertex_count(), -1),
        via_(g.vertex_count(), -1), mark_(g.vertex_count(), -1) {}

  std::vector<int> run(int center) {
    std::vector<int> all(g_.vertex_count());
    std::iota(all.begin(), all.end(), 0);
    std::vector<Piece> work{{std::move(all), center, 0}};
    next_piece_ = 1;
    while (!work.empty()) {
      Piece p = std::move(work.back());
      work.pop_back();
      split(p, work);
    }
    return std::move(tree_);
  }

 private:
  struct Piece {
    std::vector<int> vertices;
    int center;
    int id;
  };

  static constexpr int kLeafSize = 6;

  // BFS inside the piece (optionally also requiring mark_ < 0); fills dist_, via_.
  std::vector<int> bfs(int source, int id, bool unassigned_only, int max_depth) {
    std::vector<int> order{source};
    dist_[source] = 0;
    via_[source] = -1;
    for (size_t h = 0; h < order.size(); ++h) {
      int v = order[h];
      if (dist_[v] == max_depth) continue;
      for (auto [w, e] : g_.incident(v)) {
        if (piece_[w] != id || dist_[w] >= 0) continue;
        if (unassigned_only && mark_[w] >= 0) continue;
        dist_[w] = dist_[v] + 1;
        via_[w] = e;
        order.push_back(w);
      }
    }
    return order;
  }

  // Radius in [lo, hi] minimising cut / (volume + 1) among vertices of order.
  int pick_radius(const std::vector<int>& order, int id, bool unassigned_only, int lo, int hi) {
    int top = 0;
    for (int v : order) top = std::max(top, dist_[v]);
    std::vector<double> vol(top + 2, 0.0), cut(top + 2, 0.0);
    for (int v : order) {
      for (auto [w, e] : g_.incident(v)) {
        if (piece_[w] != id) continue;
        if (unassigned_only && mark_[w] >= 0) continue;
        int dv = dist_[v];
        int dw = dist_[w] >= 0 ? dist_[w] : top + 1;
        if (dw < dv || (dw == dv && w < v)) continue;  // count each edge once
        vol[dw] += 1.0;
        for (int r = dv; r < dw && r <= top; ++r) cut[r] += 1.0;
      }
    }
    for (int r = 1; r <= top + 1; ++r) vol[r] += vol[r - 1];
    int best = lo;
    for (int r = lo; r <= std::min(hi, top); ++r)
      if (cut[r] * (vol[best] + 1.0) < cut[best] * (vol[r] + 1.0)) best = r;
    return best;
  }

  void clear(const std::vector<int>& order) {
    for (int v : order) dist_[v] = -1;
  }

  void split(const Piece& p, std::vector<Piece>& work) {
    std::vector<int> order = bfs(p.center, p.id, false, -1);
    int radius = 0;
    for (int v : order) radius = std::max(radius, dist_[v]);
    if (radius <= 1 || static_cast<int>(p.vertices.size()) <= kLeafSize) {
      for (int v : order)
        if (v != p.center) tree_.push_back(via_[v]);
      clear(order);
      return;
    }

    std::vector<int> dist0(order.size()), via0(order.size());
    int r0 = pick_radius(order, p.id, false, (radius + 2) / 3, (2 * radius) / 3);
    for (size_t t = 0; t < order.size(); ++t) {
      dist0[t] = dist_[order[t]];
      via0[t] = via_[order[t]];
    }
    clear(order);

    std::vector<Piece> children;
    Piece ball{{}, p.center, next_piece_++};
    for (size_t t = 0; t < order.size(); ++t)
      if (dist0[t] <= r0) {
        ball.vertices.push_back(order[t]);
        mark_[order[t]] = ball.id;
      }
    children.push_back(std::move(ball));

    const int cone_cap = std::max(1, radius / 3);
    // order is already sorted by distance from the centre
    for (size_t t = 0; t < order.size(); ++t) {
      int y = order[t];
      if (mark_[y] >= 0) continue;
      tree_.push_back(via0[t]);  // bridge to an already assigned vertex
      std::vector<int> cone_order = bfs(y, p.id, true, cone_cap + 1);
      int ry = pick_radius(cone_order, p.id, true, 0, cone_cap);
      Piece cone{{}, y, next_piece_++};
      for (int v : cone_order)
        if (dist_[v] <= ry) cone.vertices.push_back(v);
      clear(cone_order);
      for (int v : cone.vertices) mark_[v] = cone.id;
      children.push_back(std::move(cone));
    }

    for (auto& c : children) {
      for (int v : c.vertices) {
        piece_[v] = c.id;
        mark_[v] = -1;
      }
      work.push_back(std::move(c));
    }
  }

  const UndirectedGraph& g_;
  std::vector<int> piece_, dist_, via_, mark_;
  std::vector<int> tree_;
  int next_piece_ = 0;
};

}  // namespace detail

/// Spanning tree with small total stretch. Runs a ball/cone decomposition from
/// an approximate centre and keeps it unless a plain BFS tree does better.
inline std::vector<int> spanning_tree_low_stretch(const UndirectedGraph& g) {
  if (g.vertex_count() == 0) throw Error(ErrorCode::kDisconnected, "empty graph");
  // approximate centre: midpoint of a double BFS sweep
  auto d0 = bfs_distances(g, 0);
  int far = static_cast<int>(std::max_element(d0.begin(), d0.end()) - d0.begin());
  if (std::find(d0.begin(), d0.end(), -1) != d0.end())
    throw Error(ErrorCode::kDisconnected, "graph is not connected");
  auto d1 = bfs_distances(g, far);
  int other = static_cast<int>(std::max_element(d1.begin(), d1.end()) - d1.begin());
  auto d2 = bfs_distances(g, other);
  int center = 0, best = g.vertex_count() + 1;
  for (int v = 0; v < g.vertex_count(); ++v) {
    int ecc = std::max(d1[v], d2[v]);
    if (ecc < best) {
      best = ecc;
      center = v;
    }
  }

  std::vector<int> star = detail::StarDecomposition(g).run(center);
  std::vector<int> bfs = bfs_tree(g, center);
  std::int64_t s_star = tree_stretch(g, star);
  std::int64_t s_bfs = tree_stretch(g, bfs);
  return s_star <= s_bfs ? star : bfs;
}

}  // namespace trussprec
