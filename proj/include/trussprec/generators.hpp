#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "trussprec/error.hpp"
#include "trussprec/geometry.hpp"
#include "trussprec/truss.hpp"

namespace trussprec {

/// rows x cols vertices on the unit lattice, every cell split by its rising
/// diagonal. Each vertex is moved by up to jitter (in cell units), resampling
/// until all its faces keep orientation and a 20 degree minimum angle.
inline Truss gen_grid(int rows, int cols, double jitter = 0.0, unsigned long long seed = 1) {
  if (rows < 2 || cols < 2) throw Error(ErrorCode::kInvalidInput, "grid needs at least 2x2 vertices");
  if (jitter < 0.0 || jitter >= 0.5) throw Error(ErrorCode::kInvalidInput, "jitter must be in [0, 0.5)");
  auto id = [cols](int r, int c) { return r * cols + c; };

  std::vector<Vec2> pos(rows * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) pos[id(r, c)] = {static_cast<double>(c), static_cast<double>(r)};

  std::vector<Element> elements;
  std::vector<Face> faces;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) elements.push_back({id(r, c), id(r, c + 1), 1.0});
      if (r + 1 < rows) elements.push_back({id(r, c), id(r + 1, c), 1.0});
      if (r + 1 < rows && c + 1 < cols) {
        elements.push_back({id(r, c), id(r + 1, c + 1), 1.0});
        faces.push_back({id(r, c), id(r, c + 1), id(r + 1, c + 1)});
        faces.push_back({id(r, c), id(r + 1, c), id(r + 1, c + 1)});
      }
    }

  if (jitter > 0.0) {
    std::vector<std::vector<int>> incident(pos.size());
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
      for (int v : faces[f]) incident[v].push_back(f);
    // faces as listed are counter-clockwise in lattice coordinates, up to the vertex order
    auto orientation = [&](int f) { return signed_area(pos[faces[f][0]], pos[faces[f][1]], pos[faces[f][2]]); };
    std::vector<double> sign(faces.size());
    for (size_t f = 0; f < faces.size(); ++f) sign[f] = orientation(static_cast<int>(f)) > 0 ? 1.0 : -1.0;

    const double min_angle = 20.0 * std::numbers::pi / 180.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> offset(-jitter, jitter);
    for (int v = 0; v < static_cast<int>(pos.size()); ++v) {
      const Vec2 home = pos[v];
      for (int attempt = 0; attempt < 200; ++attempt) {
        pos[v] = home + Vec2{offset(rng), offset(rng)};
        bool ok = true;
        for (int f : incident[v]) {
          const auto& t = faces[f];
          if (orientation(f) * sign[f] <= 0.0 ||
              min_triangle_angle(pos[t[0]], pos[t[1]], pos[t[2]]) < min_angle) {
            ok = false;
            break;
          }
        }
        if (ok) break;
        pos[v] = home;
      }
    }
  }
  return Truss(std::move(pos), std::move(elements), std::move(faces));
}

/// Straight strip of k equilateral faces (i, i+1, i+2) on k + 2 vertices.
inline Truss gen_path(int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidInput, "path needs at least one face");
  std::vector<Vec2> pos;
  const double h = std::sqrt(3.0) / 2.0;
  for (int i = 0; i < k + 2; ++i) pos.push_back({0.5 * i, (i % 2) * h});
  std::vector<Element> elements;
  std::vector<Face> faces;
  for (int i = 0; i + 1 < k + 2; ++i) elements.push_back({i, i + 1, 1.0});
  for (int i = 0; i + 2 < k + 2; ++i) {
    elements.push_back({i, i + 2, 1.0});
    faces.push_back({i, i + 1, i + 2});
  }
  return Truss(std::move(pos), std::move(elements), std::move(faces));
}

/// Truss path of k faces bent around a ring so that its two end vertices
/// 0 and k + 1 are about one element length apart. Even vertices sit on the
/// inner circle, odd ones on the outer; the radial split is picked to
/// maximise the smallest face angle.
inline Truss curled_path(int k, double gap = 4.0) {
  if (k < 2) throw Error(ErrorCode::kInvalidInput, "curled path needs k >= 2");
  const int n = k + 2;
  const double delta = 2.0 * std::numbers::pi / (n - 1 + gap);
  const double mid = 1.0 / (2.0 * std::sin(delta));

  auto layout = [&](double t) {
    std::vector<Vec2> pos(n);
    for (int i = 0; i < n; ++i) {
      double r = mid * (i % 2 == 0 ? 1.0 - t / 2 : 1.0 + t / 2);
      pos[i] = {r * std::cos(i * delta), r * std::sin(i * delta)};
    }
    return pos;
  };
  auto quality = [&](const std::vector<Vec2>& pos) {
    double q = std::numbers::pi;
    for (int i = 0; i + 2 < n; ++i) q = std::min(q, min_triangle_angle(pos[i], pos[i + 1], pos[i + 2]));
    return q;
  };

  double best_t = 0.02, best_q = -1.0;
  for (int s = 0; s < 149; ++s) {
    double t = 0.02 + 0.01 * s;
    double q = quality(layout(t));
    if (q > best_q) {
      best_q = q;
      best_t = t;
    }
  }

  std::vector<Element> elements;
  std::vector<Face> faces;
  for (int i = 0; i + 1 < n; ++i) elements.push_back({i, i + 1, 1.0});
  for (int i = 0; i + 2 < n; ++i) {
    elements.push_back({i, i + 2, 1.0});
    faces.push_back({i, i + 1, i + 2});
  }
  return Truss(layout(best_t), std::move(elements), std::move(faces));
}

}  // namespace trussprec
