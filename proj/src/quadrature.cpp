#include "polyfk/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "polyfk/errors.hpp"

namespace polyfk {

double QuadratureRule::weight_sum() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

std::vector<std::array<double, 2>> gauss_legendre_01(int n) {
  if (n < 1)
    throw ContractViolation("gauss_legendre_01: n >= 1 required");
  std::vector<std::array<double, 2>> rule(n);
  for (int i = 0; i < n; ++i) {
    // Root of P_n on [-1,1], Chebyshev initial guess + Newton.
    double x = std::cos(M_PI * (4.0 * i + 3.0) / (4.0 * n + 2.0));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[i] = {0.5 * (1.0 + x), 0.5 * w}; // mapped to [0,1]
  }
  return rule;
}

namespace {

int points_for_order(int order) { return (order + 3) / 2; } // ceil((order+2)/2)

// Reference-triangle rule on (0,0),(1,0),(0,1) through the collapsed-square
// map (x,y) = (u(1-v), uv) with Jacobian u. The Jacobian raises the u-degree
// by one, so both directions use ceil((order+2)/2) points.
const std::vector<std::array<double, 3>> &reference_triangle_rule(int order) {
  static std::map<int, std::vector<std::array<double, 3>>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end())
    return it->second;

  const int n = points_for_order(order);
  const auto g = gauss_legendre_01(n);
  std::vector<std::array<double, 3>> rule;
  rule.reserve(static_cast<std::size_t>(n) * n);
  for (const auto &[u, wu] : g)
    for (const auto &[v, wv] : g)
      rule.push_back({u * (1.0 - v), u * v, wu * wv * u});

  // Exactness audit against the closed form for monomial moments.
  for (int a = 0; a + 0 <= order; ++a)
    for (int b = 0; a + b <= order; ++b) {
      double q = 0.0;
      for (const auto &[x, y, w] : rule)
        q += w * std::pow(x, a) * std::pow(y, b);
      // int_T x^a y^b = a! b! / (a+b+2)!
      double exact = 1.0;
      for (int k = 1; k <= b; ++k)
        exact *= static_cast<double>(k) / (a + k);
      for (int k = a + b + 1; k <= a + b + 2; ++k)
        exact /= k;
      if (std::abs(q - exact) > 1e-12)
        throw ContractViolation("triangle rule of order " + std::to_string(order) +
                                " missed monomial x^" + std::to_string(a) + " y^" +
                                std::to_string(b));
    }
  return cache.emplace(order, std::move(rule)).first->second;
}

const std::vector<std::array<double, 2>> &segment_rule(int order) {
  static std::map<int, std::vector<std::array<double, 2>>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end())
    return it->second;
  const int n = (order + 2) / 2; // ceil((order+1)/2)
  auto rule = gauss_legendre_01(n);
  for (int k = 0; k <= order; ++k) {
    double q = 0.0;
    for (const auto &[x, w] : rule)
      q += w * std::pow(x, k);
    if (std::abs(q - 1.0 / (k + 1)) > 1e-12)
      throw ContractViolation("segment rule of order " + std::to_string(order) +
                              " missed monomial x^" + std::to_string(k));
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

} // namespace

QuadratureRule triangle_quadrature(const Point2 &a, const Point2 &b, const Point2 &c, int order) {
  if (order < 1)
    throw ContractViolation("triangle_quadrature: order >= 1 required");
  const auto &ref = reference_triangle_rule(order);
  const double jac = cross(b - a, c - a); // 2*area, positive for CCW
  QuadratureRule rule;
  rule.points.reserve(ref.size());
  rule.weights.reserve(ref.size());
  for (const auto &[x, y, w] : ref) {
    rule.points.push_back({a.x + x * (b.x - a.x) + y * (c.x - a.x),
                           a.y + x * (b.y - a.y) + y * (c.y - a.y)});
    rule.weights.push_back(w * jac);
  }
  return rule;
}

QuadratureRule element_quadrature(const PolyMesh &mesh, const SubTriangulation &sub, int element,
                                  int order) {
  QuadratureRule rule;
  for (const auto &tri : sub.triangles[element]) {
    QuadratureRule t = triangle_quadrature(tri[0], tri[1], tri[2], order);
    rule.points.insert(rule.points.end(), t.points.begin(), t.points.end());
    rule.weights.insert(rule.weights.end(), t.weights.begin(), t.weights.end());
  }
  (void)mesh;
  return rule;
}

QuadratureRule face_quadrature(const PolyMesh &mesh, const Face &face, int order) {
  if (order < 1)
    throw ContractViolation("face_quadrature: order >= 1 required");
  const Point2 a = mesh.vertices[face.vertices[0]];
  const Point2 b = mesh.vertices[face.vertices[1]];
  const auto &ref = segment_rule(order);
  QuadratureRule rule;
  rule.points.reserve(ref.size());
  rule.weights.reserve(ref.size());
  for (const auto &[s, w] : ref) {
    rule.points.push_back({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)});
    rule.weights.push_back(w * face.length);
  }
  return rule;
}

} // namespace polyfk
