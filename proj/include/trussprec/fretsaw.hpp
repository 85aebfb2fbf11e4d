#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "trussprec/rigidity.hpp"
#include "trussprec/stiffness.hpp"
#include "trussprec/truss.hpp"

namespace trussprec {

/// Split truss T' together with the maps back to T. Faces keep their index,
/// so the face map is the identity; it is still stored explicitly.
struct FretsawExtension {
  Truss extended;
  int original_vertex_count = 0;
  std::vector<int> vertex_to_original;      // pi, size m
  std::vector<int> face_to_original;        // rho, size n_f
  std::vector<std::array<int, 3>> face_copies;  // copies of face f's vertices, aligned with T.face(f)

  int copy_of(const Truss& original, int vertex, int face) const {
    const auto& f = original.face(face);
    for (int t = 0; t < 3; ++t)
      if (f[t] == vertex) return face_copies[face][t];
    throw Error(ErrorCode::kInvalidInput, "vertex not in face");
  }

  int copy_count() const { return extended.vertex_count(); }

  /// M^T x: every copy takes the displacement of its original.
  Vector lift(const Vector& x) const {
    if (x.size() != 2 * original_vertex_count) throw Error(ErrorCode::kDimensionMismatch, "lift");
    Vector out(2 * copy_count());
    for (int j = 0; j < copy_count(); ++j) out.segment<2>(2 * j) = x.segment<2>(2 * vertex_to_original[j]);
    return out;
  }

  /// M y: sums the copies of every original vertex.
  Vector collapse(const Vector& y) const {
    if (y.size() != 2 * copy_count()) throw Error(ErrorCode::kDimensionMismatch, "collapse");
    Vector out = Vector::Zero(2 * original_vertex_count);
    for (int j = 0; j < copy_count(); ++j) out.segment<2>(2 * vertex_to_original[j]) += y.segment<2>(2 * j);
    return out;
  }
};

/// Lowest-index face containing each vertex.
inline std::vector<int> default_tau(const Truss& truss) {
  std::vector<int> tau(truss.vertex_count());
  for (int v = 0; v < truss.vertex_count(); ++v) {
    auto fs = truss.faces_of_vertex(v);
    if (fs.empty()) throw Error(ErrorCode::kVertexInNoFace, "vertex " + std::to_string(v));
    tau[v] = fs.front();
  }
  return tau;
}

/// Splits every vertex i into one copy per connected component of H restricted
/// to the faces containing i. The copy in the component of tau(i) keeps index
/// i; the remaining copies are appended in (vertex, component) order.
inline FretsawExtension fretsaw(const Truss& truss, const RigidityGraph& q,
                                std::span<const int> subgraph_edges, std::span<const int> tau) {
  const int n = truss.vertex_count();
  if (static_cast<int>(tau.size()) != n) throw Error(ErrorCode::kDimensionMismatch, "tau size");
  if (auto sc = is_stiffly_connected(truss, q); !sc.stiffly_connected)
    throw Error(ErrorCode::kNotStifflyConnected, sc.witness());

  for (int e : subgraph_edges)
    if (e < 0 || e >= q.edge_count()) throw Error(ErrorCode::kInvalidInput, "subgraph edge id");
  {
    std::vector<char> touched(q.node_count(), q.node_count() == 1 ? 1 : 0);
    for (int e : subgraph_edges) touched[q.graph().edge(e).u] = touched[q.graph().edge(e).v] = 1;
    if (std::find(touched.begin(), touched.end(), 0) != touched.end())
      throw Error(ErrorCode::kNotSpanning, "subgraph misses a face");
    if (count_components(q.graph(), subgraph_edges) != 1)
      throw Error(ErrorCode::kNotConnected, "subgraph of the rigidity graph is disconnected");
  }
  for (int v = 0; v < n; ++v) {
    bool ok = tau[v] >= 0 && tau[v] < truss.face_count();
    if (ok) {
      const auto& f = truss.face(tau[v]);
      ok = std::find(f.begin(), f.end(), v) != f.end();
    }
    if (!ok)
      throw Error(ErrorCode::kInvalidInput, "tau(" + std::to_string(v) + ") does not contain the vertex");
  }

  auto comps = vertex_face_components(truss, q, subgraph_edges);

  // copy_id[v][c]: extended vertex of component c at vertex v
  std::vector<std::vector<int>> copy_id(n);
  FretsawExtension ext;
  ext.original_vertex_count = n;
  ext.vertex_to_original.resize(n);
  std::iota(ext.vertex_to_original.begin(), ext.vertex_to_original.end(), 0);
  std::vector<Vec2> positions(truss.positions().begin(), truss.positions().end());
  for (int v = 0; v < n; ++v) {
    auto fs = truss.faces_of_vertex(v);
    int anchor_local = static_cast<int>(std::lower_bound(fs.begin(), fs.end(), tau[v]) - fs.begin());
    int anchor = comps.label[v][anchor_local];
    copy_id[v].assign(comps.count[v], -1);
    copy_id[v][anchor] = v;
    for (int c = 0; c < comps.count[v]; ++c) {
      if (c == anchor) continue;
      copy_id[v][c] = static_cast<int>(positions.size());
      positions.push_back(truss.position(v));
      ext.vertex_to_original.push_back(v);
    }
  }

  std::vector<Element> elements;
  std::unordered_map<std::uint64_t, int> seen;
  std::vector<Face> faces;
  ext.face_copies.resize(truss.face_count());
  ext.face_to_original.resize(truss.face_count());
  for (int f = 0; f < truss.face_count(); ++f) {
    const auto& t = truss.face(f);
    std::array<int, 3> c{};
    for (int s = 0; s < 3; ++s) {
      int v = t[s];
      auto fs = truss.faces_of_vertex(v);
      int local = static_cast<int>(std::lower_bound(fs.begin(), fs.end(), f) - fs.begin());
      c[s] = copy_id[v][comps.label[v][local]];
    }
    ext.face_copies[f] = c;
    ext.face_to_original[f] = f;
    faces.push_back({c[0], c[1], c[2]});
    static constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (auto [a, b] : kPairs) {
      if (seen.emplace(pair_key(c[a], c[b]), static_cast<int>(elements.size())).second) {
        double gamma = truss.element(*truss.find_element(t[a], t[b])).gamma;
        elements.push_back({c[a], c[b], gamma});
      }
    }
  }
  ext.extended = Truss(std::move(positions), std::move(elements), std::move(faces));
  return ext;
}

/// Structural facts about an extension, checked against the subgraph H.
struct FretsawProperties {
  bool anchors_kept = true;        // copy of i in tau(i) has index i
  bool subgraph_preserved = true;  // H' is a subgraph of Q'
  int extra_subgraph_edges = 0;    // k = |H| - (n_f - 1)
  int edges_outside_subgraph = 0;  // |Q' - H'|
  bool outside_count_ok = true;    // |Q' - H'| <= k
  bool stiffly_connected = true;
  bool copy_count_ok = true;       // m = sum of per-vertex component counts

  bool ok() const {
    return anchors_kept && subgraph_preserved && outside_count_ok && stiffly_connected && copy_count_ok;
  }
};

inline FretsawProperties check_fretsaw(const Truss& truss, const RigidityGraph& q,
                                       std::span<const int> subgraph_edges, std::span<const int> tau,
                                       const FretsawExtension& ext) {
  FretsawProperties p;
  const Truss& t2 = ext.extended;
  RigidityGraph q2(t2);

  for (int v = 0; v < truss.vertex_count(); ++v)
    if (ext.copy_of(truss, v, tau[v]) != v) p.anchors_kept = false;

  std::vector<char> in_h(q.edge_count(), 0);
  for (int e : subgraph_edges) in_h[e] = 1;
  int h_size = 0;
  for (char c : in_h) h_size += c;
  p.extra_subgraph_edges = h_size - (truss.face_count() - 1);

  for (int e = 0; e < q.edge_count(); ++e) {
    if (!in_h[e]) continue;
    const auto& fe = q.graph().edge(e);
    if (!q2.find_edge(fe.u, fe.v)) p.subgraph_preserved = false;
  }
  for (int e = 0; e < q2.edge_count(); ++e) {
    const auto& fe = q2.graph().edge(e);
    auto orig = q.find_edge(ext.face_to_original[fe.u], ext.face_to_original[fe.v]);
    if (!orig || !in_h[*orig]) ++p.edges_outside_subgraph;
  }
  p.outside_count_ok = p.edges_outside_subgraph <= p.extra_subgraph_edges;
  p.stiffly_connected = is_stiffly_connected(t2, q2).stiffly_connected;

  auto comps = vertex_face_components(truss, q, subgraph_edges);
  int expected = std::accumulate(comps.count.begin(), comps.count.end(), 0);
  p.copy_count_ok = expected == t2.vertex_count();
  return p;
}

}  // namespace trussprec
