#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "trussprec/graph.hpp"
#include "trussprec/truss.hpp"

namespace trussprec {

/// Face adjacency graph of a truss: one node per face, one edge per pair of
/// faces sharing an element.
class RigidityGraph {
 public:
  RigidityGraph() = default;

  explicit RigidityGraph(const Truss& truss) {
    std::vector<std::vector<int>> faces_of_element(truss.element_count());
    for (int f = 0; f < truss.face_count(); ++f)
      for (int e : truss.face_elements(f)) faces_of_element[e].push_back(f);

    std::vector<std::pair<std::pair<int, int>, int>> pairs;
    for (int e = 0; e < truss.element_count(); ++e) {
      const auto& fs = faces_of_element[e];
      for (size_t a = 0; a < fs.size(); ++a)
        for (size_t b = a + 1; b < fs.size(); ++b) pairs.push_back({{fs[a], fs[b]}, e});
    }
    std::sort(pairs.begin(), pairs.end());

    std::vector<GraphEdge> edges;
    for (const auto& [fp, e] : pairs) {
      index_.emplace(pair_key(fp.first, fp.second), static_cast<int>(edges.size()));
      edges.push_back({fp.first, fp.second});
      shared_.push_back(e);
    }
    graph_ = UndirectedGraph(truss.face_count(), std::move(edges));
  }

  const UndirectedGraph& graph() const { return graph_; }
  int node_count() const { return graph_.vertex_count(); }
  int edge_count() const { return graph_.edge_count(); }

  /// Element shared by the two faces joined by edge id.
  int shared_element(int edge) const { return shared_[edge]; }

  std::optional<int> find_edge(int f1, int f2) const {
    auto it = index_.find(pair_key(f1, f2));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  UndirectedGraph graph_;
  std::vector<int> shared_;
  std::unordered_map<std::uint64_t, int> index_;
};

/// Per-vertex face components. For each vertex i, component[i][t] labels the
/// t-th face of faces_of_vertex(i) by connected component of the subgraph of
/// Q restricted to those faces, using only the listed rigidity edges. Labels
/// are dense and numbered in order of first appearance.
struct VertexFaceComponents {
  std::vector<std::vector<int>> label;
  std::vector<int> count;
};

inline VertexFaceComponents vertex_face_components(const Truss& truss, const RigidityGraph& q,
                                                   std::span<const int> edge_ids) {
  const int n = truss.vertex_count();
  std::vector<DisjointSets> sets;
  sets.reserve(n);
  for (int v = 0; v < n; ++v) sets.emplace_back(static_cast<int>(truss.faces_of_vertex(v).size()));

  auto local = [&](int v, int f) {
    auto fs = truss.faces_of_vertex(v);
    return static_cast<int>(std::lower_bound(fs.begin(), fs.end(), f) - fs.begin());
  };
  for (int id : edge_ids) {
    const auto& edge = q.graph().edge(id);
    const auto& el = truss.element(q.shared_element(id));
    for (int v : {el.i, el.j}) sets[v].unite(local(v, edge.u), local(v, edge.v));
  }

  VertexFaceComponents out;
  out.label.resize(n);
  out.count.assign(n, 0);
  for (int v = 0; v < n; ++v) {
    const int d = static_cast<int>(truss.faces_of_vertex(v).size());
    std::vector<int> root_label(d, -1);
    out.label[v].resize(d);
    for (int t = 0; t < d; ++t) {
      int r = sets[v].find(t);
      if (root_label[r] < 0) root_label[r] = out.count[v]++;
      out.label[v][t] = root_label[r];
    }
  }
  return out;
}

struct StiffConnectivity {
  bool stiffly_connected = false;
  /// Vertex whose face set is disconnected, if any. When the failure is the
  /// rigidity graph itself, witness_vertex is empty.
  std::optional<int> witness_vertex;

  std::string witness() const {
    if (stiffly_connected) return "";
    return witness_vertex ? "vertex " + std::to_string(*witness_vertex) : "rigidity graph";
  }
};

inline StiffConnectivity is_stiffly_connected(const Truss& truss, const RigidityGraph& q) {
  std::vector<int> all(q.edge_count());
  std::iota(all.begin(), all.end(), 0);
  auto comps = vertex_face_components(truss, q, all);
  for (int v = 0; v < truss.vertex_count(); ++v)
    if (comps.count[v] != 1) return {false, v};
  if (!is_connected(q.graph())) return {false, std::nullopt};
  return {true, std::nullopt};
}

inline StiffConnectivity is_stiffly_connected(const Truss& truss) {
  return is_stiffly_connected(truss, RigidityGraph(truss));
}

struct QualityBounds {
  double length_min = std::numeric_limits<double>::infinity();
  double length_max = 0.0;
  double theta_min = std::numeric_limits<double>::infinity();  // radians
  double gamma_min = std::numeric_limits<double>::infinity();
  double gamma_max = 0.0;
};

inline QualityBounds quality_bounds(const Truss& truss) {
  QualityBounds q;
  for (int e = 0; e < truss.element_count(); ++e) {
    double len = truss.element_length(e);
    q.length_min = std::min(q.length_min, len);
    q.length_max = std::max(q.length_max, len);
    q.gamma_min = std::min(q.gamma_min, truss.element(e).gamma);
    q.gamma_max = std::max(q.gamma_max, truss.element(e).gamma);
  }
  for (const auto& f : truss.faces())
    q.theta_min = std::min(q.theta_min, min_triangle_angle(truss.position(f[0]), truss.position(f[1]),
                                                           truss.position(f[2])));
  return q;
}

}  // namespace trussprec
