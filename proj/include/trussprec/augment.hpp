#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "trussprec/decompose.hpp"
#include "trussprec/embedding.hpp"
#include "trussprec/error.hpp"
#include "trussprec/planarity.hpp"
#include "trussprec/tree.hpp"

namespace trussprec {

struct AugmentResult {
  std::vector<int> extra_edges;                 // S, ascending host edge ids
  int k = 0;
  int decompose_k = 0;
  TreeDecomposition decomposition;
  std::vector<std::int64_t> tree_path_length;   // |T(e)| per host edge
  std::vector<std::int64_t> eta;
  std::vector<std::vector<int>> edge_paths;     // pi(e), walking from edge(e).u to edge(e).v
  Embedding embedding;                          // pi(z) for every demand
  std::int64_t stretch = 0;                     // str(T)
  std::int64_t psi_congestion = 0;
  std::int64_t pi_congestion = 0;

  /// k * cong(pi) <= 24 * str(T) * cong(psi), in exact integers.
  bool congestion_bound_holds() const {
    return static_cast<__int128>(k) * pi_congestion <=
           static_cast<__int128>(24) * stretch * psi_congestion;
  }
};

inline bool host_is_planar(const UndirectedGraph& g) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(g.edge_count());
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  return is_planar(g.vertex_count(), edges);
}

/// Picks at most k extra edges S so that every demand of psi can be rerouted
/// through T plus S with low congestion.
inline AugmentResult low_congest_augment(const UndirectedGraph& g, const RootedTree& tree,
                                         const Embedding& psi, int k,
                                         std::span<const Vec2> coords = {}) {
  if (k < 1) throw Error(ErrorCode::kBadK, "k must be positive");
  if (!host_is_planar(g)) throw Error(ErrorCode::kNotPlanar, "host graph");
  validate_embedding(g, psi, false);

  AugmentResult r;
  r.k = k;
  const int m = g.edge_count();
  r.tree_path_length.resize(m);
  for (int e = 0; e < m; ++e) r.tree_path_length[e] = tree.distance(g.edge(e).u, g.edge(e).v);
  for (auto len : r.tree_path_length) r.stretch += len;
  r.psi_congestion = congestion(g, psi);

  r.eta.assign(m, 0);
  for (const auto& path : psi.paths) {
    std::int64_t load = 0;
    for (int e : path) load += r.tree_path_length[e];
    for (int e : path) r.eta[e] += load;
  }
  std::int64_t total = 0;
  for (auto x : r.eta) total += x;

  r.edge_paths.resize(m);
  if (total == 0) {
    // no demand crosses a tree path: the tree alone carries everything
    for (int e = 0; e < m; ++e) r.edge_paths[e] = tree.path_edges(g.edge(e).u, g.edge(e).v);
    r.decomposition.parts.push_back({});
    for (int v = 0; v < g.vertex_count(); ++v) r.decomposition.parts[0].push_back(v);
    r.decomposition.home.assign(g.vertex_count(), 0);
    r.decomposition.top.push_back(-1);
    r.decomposition.edge_parts.assign(m, {0, 0});
  } else {
    r.decompose_k = static_cast<int>(std::min<std::int64_t>(std::max(1, k / 3), total));
    r.decomposition = decompose(tree, g, r.eta, r.decompose_k, coords);

    std::map<std::pair<int, int>, int> best;
    for (int e = 0; e < m; ++e) {
      auto [i, j] = r.decomposition.edge_parts[e];
      if (i == j) continue;
      auto key = std::minmax(i, j);
      auto [it, fresh] = best.emplace(key, e);
      if (!fresh && r.tree_path_length[e] < r.tree_path_length[it->second]) it->second = e;
    }
    for (const auto& [key, e] : best) r.extra_edges.push_back(e);
    std::sort(r.extra_edges.begin(), r.extra_edges.end());

    for (int e = 0; e < m; ++e) {
      int v = g.edge(e).u, w = g.edge(e).v;
      auto [i, j] = r.decomposition.edge_parts[e];
      if (i == j) {
        r.edge_paths[e] = tree.path_edges(v, w);
        continue;
      }
      int s = best.at(std::minmax(i, j));
      int a = g.edge(s).u, b = g.edge(s).v;
      auto [sa, sb] = r.decomposition.edge_parts[s];
      (void)sb;
      int v2 = sa == i ? a : b;  // end of s inside W_i
      int w2 = sa == i ? b : a;
      std::vector<int> walk = tree.path_edges(v, v2);
      walk.push_back(s);
      auto tail = tree.path_edges(w2, w);
      walk.insert(walk.end(), tail.begin(), tail.end());
      r.edge_paths[e] = loop_erase(g, v, walk);
    }
  }

  r.embedding.pairs = psi.pairs;
  r.embedding.paths.resize(psi.size());
  for (int z = 0; z < psi.size(); ++z) {
    int cur = psi.pairs[z].first;
    std::vector<int> walk;
    for (int e : psi.paths[z]) {
      const auto& piece = r.edge_paths[e];
      if (g.edge(e).u == cur) {
        walk.insert(walk.end(), piece.begin(), piece.end());
        cur = g.edge(e).v;
      } else {
        walk.insert(walk.end(), piece.rbegin(), piece.rend());
        cur = g.edge(e).u;
      }
    }
    r.embedding.paths[z] = loop_erase(g, psi.pairs[z].first, walk);
  }
  r.pi_congestion = congestion(g, r.embedding);
  return r;
}

}  // namespace trussprec
