#pragma once

#include <cmath>

namespace pefem {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// Rotate a direction by -90 degrees; for an edge traversed with the domain on
// its left this gives the outward normal direction.
inline Vec2 perp_right(Vec2 d) { return {d.y, -d.x}; }

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

constexpr double pi = 3.1415926535897932384626433832795;
constexpr double two_pi = 2.0 * pi;

// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  if (a == two_pi) a = 0.0;
  return a;
}

inline double angle_of(const Circle& c, Vec2 p) {
  return wrap_angle(std::atan2(p.y - c.center.y, p.x - c.center.x));
}

}  // namespace pefem
