#pragma once

#include <optional>

#include "polyfk/fields.hpp"
#include "polyfk/geometry.hpp"
#include "polyfk/mesh.hpp"

namespace polyfk {

enum class FiberKind { none, constant, radial, circular, table };

// Unit-vector axonal direction field. Radial/circular generators fall back
// to (1,0) at their center, where the direction is undefined.
struct FiberField {
  FiberKind kind = FiberKind::none;
  double angle = 0.0;
  Point2 center{};
  std::vector<Point2> table; // per element, unit vectors

  static FiberField none();
  static FiberField constant(double angle);
  static FiberField radial(const Point2 &center);
  static FiberField circular(const Point2 &center);
  static FiberField per_element(std::vector<Point2> directions);

  Point2 eval(const Point2 &p, int element = -1) const;
};

// Coefficients, boundary data and initial condition of the reaction-diffusion
// model. Time enters through expression fields; `time_dependent_operators()`
// reports whether the assembled operators change between steps.
struct ModelParams {
  FieldSpec d_ext = FieldSpec::constant(1.0);
  FieldSpec d_axn = FieldSpec::constant(0.0);
  FiberField fiber = FiberField::none();
  FieldSpec alpha = FieldSpec::constant(0.0);
  ScalarField forcing = constant_field(0.0);
  ScalarField dirichlet = constant_field(0.0);
  ScalarField neumann = constant_field(0.0);
  ScalarField initial = constant_field(0.0);

  bool time_dependent_operators() const {
    return d_ext.references_time() || d_axn.references_time() || alpha.references_time();
  }

  // Samples ellipticity and fiber normalization over the mesh; throws on
  // violated coefficient assumptions.
  void validate(const PolyMesh &mesh, double t = 0.0) const;
};

// D(x) = d_ext I + d_axn (n x n); symmetric positive definite under the
// validated coefficient assumptions.
Tensor2 diffusion_tensor(const ModelParams &params, const Point2 &x, double t = 0.0,
                         int element = -1);

FiberField synthetic_fiber_field(FiberKind kind, double angle = 0.0, const Point2 &center = {});

} // namespace polyfk
