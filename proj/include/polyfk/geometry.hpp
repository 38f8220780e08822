#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace polyfk {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(const Point2 &o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2 &o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
};

inline Point2 operator*(double s, const Point2 &p) { return p * s; }

inline double dot(const Point2 &a, const Point2 &b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2 &a, const Point2 &b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2 &a) { return std::hypot(a.x, a.y); }
inline double distance(const Point2 &a, const Point2 &b) { return norm(a - b); }

// Symmetric 2x2 tensor, e.g. the diffusion tensor d_ext*I + d_axn*(n x n).
struct Tensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  Point2 apply(const Point2 &v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Point2 &p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

// Signed area of a polygon given as an ordered vertex loop (shoelace);
// positive for counter-clockwise orientation.
double polygon_signed_area(std::span<const Point2> loop);

Point2 polygon_centroid(std::span<const Point2> loop);

// Max pairwise vertex distance.
double polygon_diameter(std::span<const Point2> loop);

bool polygon_is_convex(std::span<const Point2> loop, double tol = 1e-12);

// Sutherland-Hodgman clip of a convex polygon against the half-plane
// { p : dot(p, normal) <= offset }.
std::vector<Point2> clip_halfplane(std::span<const Point2> poly, const Point2 &normal,
                                   double offset);

} // namespace polyfk
