#pragma once

#include <cmath>

namespace deforma {

// Image-plane point: x is the column, y the row, origin at the centre of the
// top-left pixel. Every module uses this convention.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  bool operator==(const Point2&) const = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }

struct Dims {
  std::size_t height = 0;
  std::size_t width = 0;
  bool operator==(const Dims&) const = default;
};

}  // namespace deforma
