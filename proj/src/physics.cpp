#include "polyfk/physics.hpp"

#include <cmath>

#include "polyfk/errors.hpp"

namespace polyfk {

FiberField FiberField::none() { return {}; }

FiberField FiberField::constant(double angle) {
  FiberField f;
  f.kind = FiberKind::constant;
  f.angle = angle;
  return f;
}

FiberField FiberField::radial(const Point2 &center) {
  FiberField f;
  f.kind = FiberKind::radial;
  f.center = center;
  return f;
}

FiberField FiberField::circular(const Point2 &center) {
  FiberField f;
  f.kind = FiberKind::circular;
  f.center = center;
  return f;
}

FiberField FiberField::per_element(std::vector<Point2> directions) {
  FiberField f;
  f.kind = FiberKind::table;
  f.table = std::move(directions);
  for (Point2 &n : f.table) {
    const double len = norm(n);
    if (len <= 0.0)
      throw ParseError("fiber table contains a zero vector");
    n = n * (1.0 / len);
  }
  return f;
}

Point2 FiberField::eval(const Point2 &p, int element) const {
  switch (kind) {
  case FiberKind::none:
  case FiberKind::constant:
    return {std::cos(angle), std::sin(angle)};
  case FiberKind::radial: {
    const Point2 d = p - center;
    const double len = norm(d);
    if (len == 0.0)
      return {1.0, 0.0};
    return d * (1.0 / len);
  }
  case FiberKind::circular: {
    const Point2 d = p - center;
    const double len = norm(d);
    if (len == 0.0)
      return {1.0, 0.0};
    return {-d.y / len, d.x / len};
  }
  case FiberKind::table:
    if (element < 0 || element >= static_cast<int>(table.size()))
      throw ContractViolation("fiber table: element id " + std::to_string(element) +
                              " outside table");
    return table[element];
  }
  return {1.0, 0.0};
}

FiberField synthetic_fiber_field(FiberKind kind, double angle, const Point2 &center) {
  switch (kind) {
  case FiberKind::constant:
    return FiberField::constant(angle);
  case FiberKind::radial:
    return FiberField::radial(center);
  case FiberKind::circular:
    return FiberField::circular(center);
  default:
    return FiberField::none();
  }
}

Tensor2 diffusion_tensor(const ModelParams &params, const Point2 &x, double t, int element) {
  const double de = params.d_ext.eval(x, t, element);
  const double da = params.d_axn.eval(x, t, element);
  Tensor2 d{de, 0.0, de};
  if (da != 0.0) {
    const Point2 n = params.fiber.eval(x, element);
    d.xx += da * n.x * n.x;
    d.xy += da * n.x * n.y;
    d.yy += da * n.y * n.y;
  }
  return d;
}

void ModelParams::validate(const PolyMesh &mesh, double t) const {
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const Point2 c = mesh.element_centroid(k);
    const double de = d_ext.eval(c, t, k);
    const double da = d_axn.eval(c, t, k);
    if (de < 0.0 || da < 0.0)
      throw ParseError("diffusion coefficients must be non-negative (element " +
                       std::to_string(k) + ")");
    if (de == 0.0 && da == 0.0)
      throw ParseError("uniform ellipticity violated: d_ext = d_axn = 0 at element " +
                       std::to_string(k));
    if (da > 0.0) {
      const double len = norm(fiber.eval(c, k));
      if (std::abs(len - 1.0) > 1e-12)
        throw ParseError("fiber direction is not unit length at element " + std::to_string(k));
    }
  }
}

} // namespace polyfk
