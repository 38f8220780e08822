#pragma once

#include <utility>
#include <vector>

#include "polyfk/geometry.hpp"
#include "polyfk/mesh.hpp"

namespace polyfk {

// Discontinuous modal space of uniform total degree p: per element, the
// tensor-Legendre polynomials on the element's axis-aligned bounding box
// restricted to total degree <= p. The basis is orthonormal on the box
// (not on the polygon itself).
class DgSpace {
public:
  DgSpace(const PolyMesh &mesh, int degree);

  const PolyMesh &mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int n_local() const { return n_local_; }
  int n_dofs() const { return n_dofs_; }
  int dof_offset(int element) const { return element * n_local_; }
  int default_order() const { return 2 * degree_ + 2; }

  // Values and physical gradients of all local basis functions at one point.
  // Evaluation is defined on the whole plane; callers restrict to the element.
  void eval_basis(int element, const Point2 &p, std::vector<double> &values,
                  std::vector<Point2> &gradients) const;
  void eval_values(int element, const Point2 &p, std::vector<double> &values) const;

  // Point value of the DG field with coefficients C inside `element`.
  double evaluate(int element, const Point2 &p, const std::vector<double> &C) const;

  const std::pair<int, int> &powers(int i) const { return powers_[i]; }

private:
  const PolyMesh *mesh_;
  int degree_;
  int n_local_;
  int n_dofs_;
  std::vector<Rect> bboxes_;
  std::vector<std::pair<int, int>> powers_; // (a, b), a+b <= p, degree-graded
};

} // namespace polyfk
