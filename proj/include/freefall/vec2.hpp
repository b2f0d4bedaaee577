#pragma once

#include <cmath>

namespace freefall {

/// Plain 2-D Cartesian vector used for positions, velocities, and
/// accelerations throughout the planar model.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator*(double s, Vec2 v) { return v *= s; }
constexpr Vec2 operator*(Vec2 v, double s) { return v *= s; }
constexpr Vec2 operator/(Vec2 v, double s) { return v *= (1.0 / s); }
constexpr Vec2 operator-(const Vec2& v) { return {-v.x, -v.y}; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 3-D cross product of two in-plane vectors.
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

constexpr double norm_sq(const Vec2& v) { return v.x * v.x + v.y * v.y; }

inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

}  // namespace freefall
