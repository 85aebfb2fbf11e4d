#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "trussprec/error.hpp"
#include "trussprec/geometry.hpp"
#include "trussprec/graph.hpp"
#include "trussprec/planarity.hpp"
#include "trussprec/tree.hpp"

namespace trussprec {

/// Cover of the tree vertices by connected parts meeting in at most one
/// vertex, with every host edge attributed to one part or a pair of parts.
struct TreeDecomposition {
  std::vector<std::vector<int>> parts;          // sorted vertex lists
  std::vector<int> home;                        // part owning each vertex
  std::vector<int> top;                         // per part: shared top vertex, or -1
  std::vector<std::array<int, 2>> edge_parts;   // [part of u, part of v] per host edge

  int part_count() const { return static_cast<int>(parts.size()); }
};

namespace detail {

inline bool scaled_at_least(std::int64_t x, int k, std::int64_t bound) {
  return static_cast<__int128>(x) * k >= static_cast<__int128>(bound);
}
inline bool scaled_at_most(std::int64_t x, int k, std::int64_t bound) {
  return static_cast<__int128>(x) * k <= static_cast<__int128>(bound);
}

}  // namespace detail

/// Splits the tree bottom-up into at most k parts. Every part that is not a
/// single vertex carries at most 4W/k of the weight eta attributed to it,
/// where W is the total weight. When coordinates are given, children are
/// visited in angular order around their parent.
inline TreeDecomposition decompose(const RootedTree& tree, const UndirectedGraph& host,
                                   std::span<const std::int64_t> eta, int k,
                                   std::span<const Vec2> coords = {}) {
  const int n = host.vertex_count();
  if (static_cast<int>(eta.size()) != host.edge_count())
    throw Error(ErrorCode::kDimensionMismatch, "eta size");
  std::int64_t total = 0;
  for (auto x : eta) {
    if (x < 0) throw Error(ErrorCode::kInvalidInput, "negative edge weight");
    total += x;
  }
  if (k < 1 || static_cast<std::int64_t>(k) > total)
    throw Error(ErrorCode::kBadK, "need 1 <= k <= total weight (" + std::to_string(total) + ")");

  std::vector<std::int64_t> w(n, 0);
  for (int e = 0; e < host.edge_count(); ++e) {
    w[host.edge(e).u] += eta[e];
    w[host.edge(e).v] += eta[e];
  }
  // vertex weights sum to 2W; close a group once it reaches 2W/k, cap at 4W/k
  const std::int64_t theta_num = 2 * total, tau_num = 4 * total;
  auto heavy_enough = [&](std::int64_t x) { return detail::scaled_at_least(x, k, theta_num); };
  auto fits = [&](std::int64_t x) { return detail::scaled_at_most(x, k, tau_num); };

  TreeDecomposition out;
  out.home.assign(n, -1);
  auto close = [&](std::vector<int> homes, int top) {
    int id = out.part_count();
    for (int v : homes) out.home[v] = id;
    if (top >= 0) homes.push_back(top);
    std::sort(homes.begin(), homes.end());
    out.parts.push_back(std::move(homes));
    out.top.push_back(top);
    return id;
  };

  std::vector<std::vector<int>> cluster(n);
  std::vector<std::int64_t> cluster_weight(n, 0);
  std::vector<char> open(n, 0);

  auto order = tree.bfs_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    std::vector<int> kids = tree.children(v);
    if (!coords.empty()) {
      Vec2 ref = tree.parent(v) >= 0 ? coords[tree.parent(v)] - coords[v] : Vec2{1.0, 0.0};
      double base = std::atan2(ref.y, ref.x);
      auto angle = [&](int c) {
        Vec2 d = coords[c] - coords[v];
        double a = std::atan2(d.y, d.x) - base;
        while (a <= 0.0) a += 2.0 * std::numbers::pi;
        return a;
      };
      std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) { return angle(a) < angle(b); });
    }

    std::vector<int> bundle;
    std::int64_t bundle_weight = 0;
    for (int c : kids) {
      if (!open[c]) continue;
      open[c] = 0;
      bundle.insert(bundle.end(), cluster[c].begin(), cluster[c].end());
      bundle_weight += cluster_weight[c];
      std::vector<int>().swap(cluster[c]);
      if (heavy_enough(bundle_weight)) {
        close(std::move(bundle), v);
        bundle.clear();
        bundle_weight = 0;
      }
    }

    if (!fits(w[v])) {
      if (!bundle.empty()) close(std::move(bundle), v);
      close({v}, -1);
    } else if (heavy_enough(w[v])) {
      if (fits(w[v] + bundle_weight)) {
        bundle.push_back(v);
        close(std::move(bundle), -1);
      } else {
        if (!bundle.empty()) close(std::move(bundle), v);
        close({v}, -1);
      }
    } else {
      bundle.push_back(v);
      bundle_weight += w[v];
      if (heavy_enough(bundle_weight)) {
        close(std::move(bundle), -1);
      } else {
        cluster[v] = std::move(bundle);
        cluster_weight[v] = bundle_weight;
        open[v] = 1;
      }
    }
  }

  const int root = tree.root();
  if (open[root]) {
    int target = -1;
    if (cluster_weight[root] == 0) {
      // weightless leftover: fold it into a neighbouring part that is not a heavy singleton
      for (int x : cluster[root]) {
        for (int c : tree.children(x)) {
          int p = out.home[c];
          if (p < 0) continue;
          if (out.parts[p].size() == 1 && !fits(w[out.parts[p][0]])) continue;
          target = p;
          break;
        }
        if (target >= 0) break;
      }
    }
    if (target >= 0) {
      for (int x : cluster[root]) out.home[x] = target;
      auto& part = out.parts[target];
      part.insert(part.end(), cluster[root].begin(), cluster[root].end());
      std::sort(part.begin(), part.end());
    } else {
      close(std::move(cluster[root]), -1);
    }
  }

  out.edge_parts.resize(host.edge_count());
  for (int e = 0; e < host.edge_count(); ++e) {
    int a = host.edge(e).u, b = host.edge(e).v;
    int ha = out.home[a], hb = out.home[b];
    if (ha == hb || out.top[ha] == b)
      out.edge_parts[e] = {ha, ha};
    else if (out.top[hb] == a)
      out.edge_parts[e] = {hb, hb};
    else
      out.edge_parts[e] = {ha, hb};
  }
  return out;
}

struct DecompositionCheck {
  bool covers = true;
  bool overlap_ok = true;
  bool connected = true;
  bool endpoints_ok = true;
  bool quotient_planar = true;
  bool weights_ok = true;
  bool count_ok = true;
  std::vector<std::string> violations;

  bool ok() const {
    return covers && overlap_ok && connected && endpoints_ok && quotient_planar && weights_ok && count_ok;
  }
};

inline DecompositionCheck check_decomposition(const RootedTree& tree, const UndirectedGraph& host,
                                              std::span<const std::int64_t> eta, int k,
                                              const TreeDecomposition& d) {
  DecompositionCheck r;
  const int n = host.vertex_count();
  const int c = d.part_count();
  std::vector<std::vector<int>> parts_of(n);
  for (int p = 0; p < c; ++p)
    for (int v : d.parts[p]) parts_of[v].push_back(p);

  for (int v = 0; v < n; ++v)
    if (parts_of[v].empty()) {
      r.covers = false;
      r.violations.push_back("vertex " + std::to_string(v) + " in no part");
    }

  std::map<std::pair<int, int>, int> shared;
  for (int v = 0; v < n; ++v)
    for (size_t a = 0; a < parts_of[v].size(); ++a)
      for (size_t b = a + 1; b < parts_of[v].size(); ++b)
        if (++shared[{parts_of[v][a], parts_of[v][b]}] > 1) r.overlap_ok = false;
  if (!r.overlap_ok) r.violations.push_back("two parts share more than one vertex");

  std::vector<int> stamp(n, -1), local(n, 0);
  for (int p = 0; p < c; ++p) {
    const auto& part = d.parts[p];
    for (size_t t = 0; t < part.size(); ++t) {
      stamp[part[t]] = p;
      local[part[t]] = static_cast<int>(t);
    }
    DisjointSets sets(static_cast<int>(part.size()));
    int comps = static_cast<int>(part.size());
    for (int v : part) {
      int u = tree.parent(v);
      if (u >= 0 && stamp[u] == p && sets.unite(local[v], local[u])) --comps;
    }
    if (comps != 1) {
      r.connected = false;
      r.violations.push_back("part " + std::to_string(p) + " is not connected in the tree");
    }
  }

  auto contains = [&](int p, int v) {
    return std::binary_search(d.parts[p].begin(), d.parts[p].end(), v);
  };
  std::vector<std::pair<int, int>> quotient;
  std::vector<std::int64_t> attributed(c, 0);
  std::int64_t total = std::accumulate(eta.begin(), eta.end(), std::int64_t{0});
  for (int e = 0; e < host.edge_count(); ++e) {
    auto [i, j] = d.edge_parts[e];
    int a = host.edge(e).u, b = host.edge(e).v;
    if (i < 0 || j < 0 || i >= c || j >= c) {
      r.endpoints_ok = false;
      continue;
    }
    if (i == j) {
      if (!contains(i, a) || !contains(i, b)) r.endpoints_ok = false;
      attributed[i] += eta[e];
    } else {
      if (!contains(i, a) || !contains(j, b)) r.endpoints_ok = false;
      quotient.push_back({std::min(i, j), std::max(i, j)});
      attributed[i] += eta[e];
      attributed[j] += eta[e];
    }
  }
  if (!r.endpoints_ok) r.violations.push_back("edge attribution does not match endpoints");

  std::sort(quotient.begin(), quotient.end());
  quotient.erase(std::unique(quotient.begin(), quotient.end()), quotient.end());
  r.quotient_planar = is_planar(c, quotient);
  if (!r.quotient_planar) r.violations.push_back("quotient graph is not planar");

  for (int p = 0; p < c; ++p) {
    if (d.parts[p].size() == 1) continue;
    if (!detail::scaled_at_most(attributed[p], k, 4 * total)) {
      r.weights_ok = false;
      r.violations.push_back("part " + std::to_string(p) + " exceeds 4W/k");
    }
  }
  r.count_ok = c <= k;
  if (!r.count_ok) r.violations.push_back("more than k parts");
  return r;
}

}  // namespace trussprec
