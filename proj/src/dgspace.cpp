#include "polyfk/dgspace.hpp"

#include <cmath>

#include "polyfk/errors.hpp"

namespace polyfk {

namespace {

// Legendre values and derivatives up to degree p at u in [-1,1].
void legendre_all(int p, double u, double *val, double *der) {
  val[0] = 1.0;
  der[0] = 0.0;
  if (p == 0)
    return;
  val[1] = u;
  der[1] = 1.0;
  for (int n = 1; n < p; ++n) {
    val[n + 1] = ((2.0 * n + 1.0) * u * val[n] - n * val[n - 1]) / (n + 1);
    der[n + 1] = der[n - 1] + (2.0 * n + 1.0) * val[n];
  }
}

} // namespace

DgSpace::DgSpace(const PolyMesh &mesh, int degree) : mesh_(&mesh), degree_(degree) {
  if (degree < 1 || degree > 30)
    throw ContractViolation("DgSpace: degree p must be in [1, 30]");
  n_local_ = (degree + 1) * (degree + 2) / 2;
  n_dofs_ = n_local_ * mesh.n_elements();
  bboxes_.reserve(mesh.n_elements());
  for (int k = 0; k < mesh.n_elements(); ++k)
    bboxes_.push_back(mesh.element_bbox(k));
  powers_.reserve(n_local_);
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a)
      powers_.emplace_back(a, d - a);
}

void DgSpace::eval_basis(int element, const Point2 &p, std::vector<double> &values,
                         std::vector<Point2> &gradients) const {
  const Rect &box = bboxes_[element];
  const double hx = box.width(), hy = box.height();
  const double u = 2.0 * (p.x - box.x0) / hx - 1.0;
  const double v = 2.0 * (p.y - box.y0) / hy - 1.0;

  const int n1 = degree_ + 1;
  double lu[32], du[32], lv[32], dv[32];
  legendre_all(degree_, u, lu, du);
  legendre_all(degree_, v, lv, dv);
  // Normalize so that the 1D factors are orthonormal on the box edges.
  for (int n = 0; n < n1; ++n) {
    const double sx = std::sqrt((2.0 * n + 1.0) / hx);
    const double sy = std::sqrt((2.0 * n + 1.0) / hy);
    du[n] = du[n] * sx * 2.0 / hx;
    lu[n] *= sx;
    dv[n] = dv[n] * sy * 2.0 / hy;
    lv[n] *= sy;
  }

  values.resize(n_local_);
  gradients.resize(n_local_);
  for (int i = 0; i < n_local_; ++i) {
    const auto [a, b] = powers_[i];
    values[i] = lu[a] * lv[b];
    gradients[i] = {du[a] * lv[b], lu[a] * dv[b]};
  }
}

void DgSpace::eval_values(int element, const Point2 &p, std::vector<double> &values) const {
  const Rect &box = bboxes_[element];
  const double hx = box.width(), hy = box.height();
  const double u = 2.0 * (p.x - box.x0) / hx - 1.0;
  const double v = 2.0 * (p.y - box.y0) / hy - 1.0;

  const int n1 = degree_ + 1;
  double lu[32], du[32], lv[32], dv[32];
  legendre_all(degree_, u, lu, du);
  legendre_all(degree_, v, lv, dv);
  for (int n = 0; n < n1; ++n) {
    lu[n] *= std::sqrt((2.0 * n + 1.0) / hx);
    lv[n] *= std::sqrt((2.0 * n + 1.0) / hy);
  }
  values.resize(n_local_);
  for (int i = 0; i < n_local_; ++i) {
    const auto [a, b] = powers_[i];
    values[i] = lu[a] * lv[b];
  }
}

double DgSpace::evaluate(int element, const Point2 &p, const std::vector<double> &C) const {
  if (static_cast<int>(C.size()) != n_dofs_)
    throw ContractViolation("DgSpace::evaluate: coefficient vector has wrong length");
  std::vector<double> values;
  eval_values(element, p, values);
  double s = 0.0;
  const int off = dof_offset(element);
  for (int i = 0; i < n_local_; ++i)
    s += C[off + i] * values[i];
  return s;
}

} // namespace polyfk
