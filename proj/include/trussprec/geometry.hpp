#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace trussprec {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Rotation by +90 degrees.
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline double signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

// Interior angle at a in triangle abc, in radians.
inline double corner_angle(Vec2 a, Vec2 b, Vec2 c) {
  Vec2 u = b - a;
  Vec2 v = c - a;
  return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

inline double min_triangle_angle(Vec2 a, Vec2 b, Vec2 c) {
  return std::min({corner_angle(a, b, c), corner_angle(b, c, a), corner_angle(c, a, b)});
}

inline double degrees(double radians) { return radians * 180.0 / std::numbers::pi; }

/// True when p lies strictly inside triangle abc. Points on the boundary
/// (within tol in barycentric coordinates) are not inside.
inline bool strictly_inside(Vec2 p, Vec2 a, Vec2 b, Vec2 c, double tol = 1e-10) {
  double area = cross(b - a, c - a);
  if (area == 0.0) return false;
  double l1 = cross(b - p, c - p) / area;
  double l2 = cross(c - p, a - p) / area;
  double l3 = 1.0 - l1 - l2;
  return l1 > tol && l2 > tol && l3 > tol;
}

}  // namespace trussprec
