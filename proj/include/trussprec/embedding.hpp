#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trussprec/error.hpp"
#include "trussprec/graph.hpp"

namespace trussprec {

/// Routes each demand pair (v, w) along a walk of host edges starting at v.
struct Embedding {
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::vector<int>> paths;

  int size() const { return static_cast<int>(pairs.size()); }
};

/// Vertex sequence of a walk from start along edges; throws if the walk is broken.
inline std::vector<int> walk_vertices(const UndirectedGraph& g, int start, std::span<const int> edges) {
  std::vector<int> verts{start};
  for (int e : edges) {
    const auto& ge = g.edge(e);
    int cur = verts.back();
    if (ge.u == cur)
      verts.push_back(ge.v);
    else if (ge.v == cur)
      verts.push_back(ge.u);
    else
      throw Error(ErrorCode::kInvalidInput, "walk is not contiguous");
  }
  return verts;
}

/// Removes cycles from a walk in order of appearance (chronological loop erasure).
inline std::vector<int> loop_erase(const UndirectedGraph& g, int start, std::span<const int> edges) {
  std::vector<int> verts{start}, out;
  std::unordered_map<int, int> at{{start, 0}};
  for (int e : edges) {
    int next = g.other(e, verts.back());
    auto it = at.find(next);
    if (it != at.end()) {
      int keep = it->second;
      for (size_t t = keep + 1; t < verts.size(); ++t) at.erase(verts[t]);
      verts.resize(keep + 1);
      out.resize(keep);
    } else {
      at.emplace(next, static_cast<int>(verts.size()));
      verts.push_back(next);
      out.push_back(e);
    }
  }
  return out;
}

inline bool is_simple_path(const UndirectedGraph& g, int start, std::span<const int> edges) {
  auto verts = walk_vertices(g, start, edges);
  std::sort(verts.begin(), verts.end());
  return std::adjacent_find(verts.begin(), verts.end()) == verts.end();
}

/// Checks that every path is a walk from pairs[z].first to pairs[z].second.
inline void validate_embedding(const UndirectedGraph& g, const Embedding& emb, bool require_simple) {
  if (emb.pairs.size() != emb.paths.size()) throw Error(ErrorCode::kInvalidInput, "embedding size");
  for (int z = 0; z < emb.size(); ++z) {
    for (int e : emb.paths[z])
      if (e < 0 || e >= g.edge_count()) throw Error(ErrorCode::kInvalidInput, "embedding edge id");
    auto verts = walk_vertices(g, emb.pairs[z].first, emb.paths[z]);
    if (verts.back() != emb.pairs[z].second)
      throw Error(ErrorCode::kInvalidInput, "path does not end at its pair");
    if (require_simple && !is_simple_path(g, emb.pairs[z].first, emb.paths[z]))
      throw Error(ErrorCode::kInvalidInput, "path is not simple");
  }
}

/// load[f] = sum of |path| over paths using f (a path using f twice counts twice).
inline std::vector<std::int64_t> edge_loads(const UndirectedGraph& g, const Embedding& emb) {
  std::vector<std::int64_t> load(g.edge_count(), 0);
  for (const auto& p : emb.paths)
    for (int e : p) load[e] += static_cast<std::int64_t>(p.size());
  return load;
}

inline std::int64_t congestion(const UndirectedGraph& g, const Embedding& emb) {
  auto load = edge_loads(g, emb);
  return load.empty() ? 0 : *std::max_element(load.begin(), load.end());
}

/// Writes "z v w : e1 e2 ..." lines.
inline void write_embedding(std::ostream& out, const Embedding& emb) {
  for (int z = 0; z < emb.size(); ++z) {
    out << z << ' ' << emb.pairs[z].first << ' ' << emb.pairs[z].second << " :";
    for (int e : emb.paths[z]) out << ' ' << e;
    out << '\n';
  }
}

}  // namespace trussprec
