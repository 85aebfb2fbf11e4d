#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <numeric>
#include <vector>

#include "trussprec/error.hpp"
#include "trussprec/geometry.hpp"
#include "trussprec/graph.hpp"

namespace trussprec {

inline constexpr double kMinElementLength = 1e-12;
inline constexpr double kMinFaceArea = 1e-12;
inline constexpr double kInsideTolerance = 1e-10;

/// Bar between vertices i < j with Young modulus times cross-section gamma.
struct Element {
  int i = 0;
  int j = 0;
  double gamma = 1.0;
};

/// Triangle of three truss vertices, stored in ascending order.
using Face = std::array<int, 3>;

inline Face sorted_face(Face f) {
  std::sort(f.begin(), f.end());
  return f;
}

namespace detail {

// Finds vertices lying strictly inside some face. Returns {vertex, face} or nullopt.
inline std::optional<std::pair<int, int>> find_vertex_inside(std::span<const Vec2> pos,
                                                             std::span<const Face> faces) {
  std::vector<int> by_x(pos.size());
  std::iota(by_x.begin(), by_x.end(), 0);
  std::sort(by_x.begin(), by_x.end(), [&](int a, int b) { return pos[a].x < pos[b].x; });
  for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
    const Vec2 a = pos[faces[f][0]], b = pos[faces[f][1]], c = pos[faces[f][2]];
    double x0 = std::min({a.x, b.x, c.x}), x1 = std::max({a.x, b.x, c.x});
    double y0 = std::min({a.y, b.y, c.y}), y1 = std::max({a.y, b.y, c.y});
    auto it = std::lower_bound(by_x.begin(), by_x.end(), x0,
                               [&](int v, double x) { return pos[v].x < x; });
    for (; it != by_x.end() && pos[*it].x <= x1; ++it) {
      int v = *it;
      if (pos[v].y < y0 || pos[v].y > y1) continue;
      if (v == faces[f][0] || v == faces[f][1] || v == faces[f][2]) continue;
      if (strictly_inside(pos[v], a, b, c, kInsideTolerance)) return std::pair{v, f};
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Faces implied by the element graph: every 3-cycle whose triangle contains no
/// other vertex in its interior. Output triples are sorted and listed in
/// lexicographic order.
inline std::vector<Face> infer_faces(std::span<const Vec2> positions,
                                     std::span<const Element> elements) {
  const int n = static_cast<int>(positions.size());
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : elements) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::vector<Face> candidates;
  for (const auto& e : elements) {
    int i = std::min(e.i, e.j), j = std::max(e.i, e.j);
    std::vector<int> common;
    std::set_intersection(adj[i].begin(), adj[i].end(), adj[j].begin(), adj[j].end(),
                          std::back_inserter(common));
    for (int k : common) {
      if (k <= j) continue;
      if (std::abs(signed_area(positions[i], positions[j], positions[k])) < kMinFaceArea)
        throw Error(ErrorCode::kDegenerateFace, "triangle (" + std::to_string(i) + "," +
                                                    std::to_string(j) + "," + std::to_string(k) +
                                                    ") has collinear vertices");
      candidates.push_back({i, j, k});
    }
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<Face> faces;
  for (const auto& f : candidates) {
    std::array<Face, 1> one{f};
    if (!detail::find_vertex_inside(positions, one)) faces.push_back(f);
  }
  return faces;
}

/// Immutable planar truss: vertex positions, elements and triangular faces.
/// Construction validates every structural invariant.
class Truss {
 public:
  Truss() = default;

  Truss(std::vector<Vec2> positions, std::vector<Element> elements,
        std::optional<std::vector<Face>> faces = std::nullopt)
      : positions_(std::move(positions)), elements_(std::move(elements)) {
    const int n = vertex_count();
    for (const auto& p : positions_)
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw Error(ErrorCode::kInvalidInput, "non-finite vertex position");

    for (int id = 0; id < element_count(); ++id) {
      auto& e = elements_[id];
      if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n)
        throw Error(ErrorCode::kInvalidInput, "element " + std::to_string(id) + " endpoint out of range");
      if (e.i == e.j)
        throw Error(ErrorCode::kInvalidInput, "element " + std::to_string(id) + " is a self loop");
      if (!(e.gamma > 0.0) || !std::isfinite(e.gamma))
        throw Error(ErrorCode::kInvalidInput, "element " + std::to_string(id) + " needs gamma > 0");
      if (e.i > e.j) std::swap(e.i, e.j);
      if (norm(positions_[e.j] - positions_[e.i]) < kMinElementLength)
        throw Error(ErrorCode::kZeroLengthElement, "element " + std::to_string(id));
      if (!element_index_.emplace(pair_key(e.i, e.j), id).second)
        throw Error(ErrorCode::kInvalidInput, "duplicate element (" + std::to_string(e.i) + "," +
                                                  std::to_string(e.j) + ")");
    }

    if (faces) {
      faces_ = std::move(*faces);
      for (auto& f : faces_) f = sorted_face(f);
      validate_faces();
    } else {
      faces_ = infer_faces(positions_, elements_);
    }

    faces_of_vertex_.assign(n, {});
    face_elements_.resize(faces_.size());
    std::vector<char> covered(element_count(), 0);
    for (int f = 0; f < face_count(); ++f) {
      const auto& t = faces_[f];
      for (int v : t) faces_of_vertex_[v].push_back(f);
      face_elements_[f] = {*find_element(t[0], t[1]), *find_element(t[0], t[2]),
                           *find_element(t[1], t[2])};
      for (int e : face_elements_[f]) covered[e] = 1;
    }
    for (int id = 0; id < element_count(); ++id)
      if (!covered[id])
        throw Error(ErrorCode::kInvalidInput,
                    "element (" + std::to_string(elements_[id].i) + "," +
                        std::to_string(elements_[id].j) + ") lies in no face");
  }

  int vertex_count() const { return static_cast<int>(positions_.size()); }
  int element_count() const { return static_cast<int>(elements_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }
  int dof_count() const { return 2 * vertex_count(); }

  std::span<const Vec2> positions() const { return positions_; }
  const Vec2& position(int v) const { return positions_[v]; }
  std::span<const Element> elements() const { return elements_; }
  const Element& element(int id) const { return elements_[id]; }
  std::span<const Face> faces() const { return faces_; }
  const Face& face(int f) const { return faces_[f]; }

  /// Faces containing v, ascending.
  std::span<const int> faces_of_vertex(int v) const { return faces_of_vertex_[v]; }

  /// Element ids of the edges (a,b), (a,c), (b,c) of face (a,b,c).
  const std::array<int, 3>& face_elements(int f) const { return face_elements_[f]; }

  std::optional<int> find_element(int a, int b) const {
    auto it = element_index_.find(pair_key(a, b));
    if (it == element_index_.end()) return std::nullopt;
    return it->second;
  }

  double element_length(int id) const {
    return norm(positions_[elements_[id].j] - positions_[elements_[id].i]);
  }

 private:
  void validate_faces() {
    const int n = vertex_count();
    for (int f = 0; f < face_count(); ++f) {
      const auto& t = faces_[f];
      const std::string name = "face " + std::to_string(f);
      for (int v : t)
        if (v < 0 || v >= n) throw Error(ErrorCode::kInvalidInput, name + " vertex out of range");
      if (t[0] == t[1] || t[1] == t[2])
        throw Error(ErrorCode::kInvalidInput, name + " repeats a vertex");
      if (!find_element(t[0], t[1]) || !find_element(t[0], t[2]) || !find_element(t[1], t[2]))
        throw Error(ErrorCode::kInvalidInput, name + " edge is not an element");
      if (std::abs(signed_area(positions_[t[0]], positions_[t[1]], positions_[t[2]])) < kMinFaceArea)
        throw Error(ErrorCode::kDegenerateFace, name);
    }
    auto sorted = faces_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(ErrorCode::kInvalidInput, "duplicate face");
    if (auto hit = detail::find_vertex_inside(positions_, faces_))
      throw Error(ErrorCode::kInvalidInput, "vertex " + std::to_string(hit->first) +
                                                " lies inside face " + std::to_string(hit->second));
  }

  std::vector<Vec2> positions_;
  std::vector<Element> elements_;
  std::vector<Face> faces_;
  std::vector<std::vector<int>> faces_of_vertex_;
  std::vector<std::array<int, 3>> face_elements_;
  std::unordered_map<std::uint64_t, int> element_index_;
};

}  // namespace trussprec
