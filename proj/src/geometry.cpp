#include "polyfk/geometry.hpp"

namespace polyfk {

double polygon_signed_area(std::span<const Point2> loop) {
  double a = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 &p = loop[i];
    const Point2 &q = loop[(i + 1) % n];
    a += cross(p, q);
  }
  return 0.5 * a;
}

Point2 polygon_centroid(std::span<const Point2> loop) {
  double a = 0.0, cx = 0.0, cy = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 &p = loop[i];
    const Point2 &q = loop[(i + 1) % n];
    const double w = cross(p, q);
    a += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  a *= 0.5;
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

double polygon_diameter(std::span<const Point2> loop) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i)
    for (std::size_t j = i + 1; j < loop.size(); ++j) {
      const Point2 d = loop[i] - loop[j];
      d2 = std::max(d2, dot(d, d));
    }
  return std::sqrt(d2);
}

bool polygon_is_convex(std::span<const Point2> loop, double tol) {
  const std::size_t n = loop.size();
  if (n < 4)
    return true;
  const double scale = polygon_diameter(loop);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = loop[(i + 1) % n] - loop[i];
    const Point2 b = loop[(i + 2) % n] - loop[(i + 1) % n];
    if (cross(a, b) < -tol * scale * scale)
      return false;
  }
  return true;
}

std::vector<Point2> clip_halfplane(std::span<const Point2> poly, const Point2 &normal,
                                   double offset) {
  std::vector<Point2> out;
  const std::size_t n = poly.size();
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 &p = poly[i];
    const Point2 &q = poly[(i + 1) % n];
    const double dp = dot(p, normal) - offset;
    const double dq = dot(q, normal) - offset;
    if (dp <= 0.0)
      out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
      const double s = dp / (dp - dq);
      out.push_back({p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)});
    }
  }
  return out;
}

} // namespace polyfk
