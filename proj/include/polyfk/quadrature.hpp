#pragma once

#include <array>
#include <vector>

#include "polyfk/geometry.hpp"
#include "polyfk/mesh.hpp"

namespace polyfk {

// Quadrature rule in physical coordinates. Weights are positive and sum to
// the measure of the integration domain. Rules of requested polynomial
// exactness are self-verified once per order on the reference domain.
struct QuadratureRule {
  std::vector<Point2> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
  double weight_sum() const;
};

// Gauss-Legendre nodes/weights on [0,1], exact for polynomials of degree
// 2n-1. Nodes are Newton-refined to machine precision.
std::vector<std::array<double, 2>> gauss_legendre_01(int n);

// Rule on a physical triangle, exact for bivariate polynomials of total
// degree <= order (tensor Gauss through the collapsed-square map).
QuadratureRule triangle_quadrature(const Point2 &a, const Point2 &b, const Point2 &c, int order);

// Composite rule over the sub-triangles of one element.
QuadratureRule element_quadrature(const PolyMesh &mesh, const SubTriangulation &sub, int element,
                                  int order);

// Gauss-Legendre rule along a face segment; weights sum to |F|.
QuadratureRule face_quadrature(const PolyMesh &mesh, const Face &face, int order);

} // namespace polyfk
