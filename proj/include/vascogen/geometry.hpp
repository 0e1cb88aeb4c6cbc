#pragma once

#include <algorithm>
#include <cmath>

namespace vascogen {

// A 2D or 3D point in meters. 2D points keep z == 0; the dim tag is what
// domain queries check against. Arithmetic never mixes dimensions in practice,
// so binary ops simply propagate the left operand's dim.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  int dim = 3;

  Point() = default;
  Point(double px, double py) : x(px), y(py), z(0.0), dim(2) {}
  Point(double px, double py, double pz) : x(px), y(py), z(pz), dim(3) {}

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Point operator+(Point a, const Point& b) {
  a.x += b.x;
  a.y += b.y;
  a.z += b.z;
  return a;
}

inline Point operator-(Point a, const Point& b) {
  a.x -= b.x;
  a.y -= b.y;
  a.z -= b.z;
  return a;
}

inline Point operator*(double s, Point p) {
  p.x *= s;
  p.y *= s;
  p.z *= s;
  return p;
}

inline double dot(const Point& a, const Point& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm2(const Point& a) { return dot(a, a); }

inline double norm(const Point& a) { return std::sqrt(norm2(a)); }

inline double dist(const Point& a, const Point& b) { return norm(a - b); }

inline Point lerp(const Point& a, const Point& b, double t) {
  Point p = a + t * (b - a);
  p.dim = a.dim;
  return p;
}

// A straight cylindrical segment. radius == 0 means "not realized yet".
struct SegmentGeometry {
  Point proximal;
  Point distal;
  double radius = 0.0;

  double length() const { return dist(proximal, distal); }
};

// Exact Euclidean distance from p to the closed segment [a, b].
inline double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = norm2(ab);
  if (len2 <= 0.0) return dist(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return dist(p, a + t * ab);
}

// Exact Euclidean distance between the closed segments [p1,q1] and [p2,q2].
// Clamped closest-point computation; handles degenerate and parallel cases.
inline double segment_segment_distance(const Point& p1, const Point& q1,
                                        const Point& p2, const Point& q2) {
  const Point d1 = q1 - p1;
  const Point d2 = q2 - p2;
  const Point r = p1 - p2;
  const double a = norm2(d1);
  const double e = norm2(d2);
  const double f = dot(d2, r);
  constexpr double kTiny = 1e-300;

  double s = 0.0, t = 0.0;
  if (a <= kTiny && e <= kTiny) {
    return dist(p1, p2);
  }
  if (a <= kTiny) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= kTiny) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      if (denom > kTiny) {
        s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      }
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  const Point c1 = p1 + s * d1;
  const Point c2 = p2 + t * d2;
  return dist(c1, c2);
}

} // namespace vascogen
