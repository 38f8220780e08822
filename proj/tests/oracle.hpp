#pragma once

// Test-only reference machinery, kept independent of the implementation
// paths it cross-checks: its own Gauss nodes, its own triangle decomposition
// (vertex fan instead of centroid fan) and Green's-theorem polygon moments.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "polyfk/assembly.hpp"
#include "polyfk/dgspace.hpp"
#include "polyfk/mesh.hpp"
#include "polyfk/physics.hpp"

namespace oracle {

using polyfk::Point2;

// Gauss-Legendre nodes/weights on [0,1] (independent Newton code).
std::vector<std::pair<double, double>> gauss01(int n);

// Exact integral of x^a y^b over a CCW polygon via the divergence identity.
double polygon_monomial(const std::vector<Point2> &loop, int a, int b);

// Integral of f over a CCW convex polygon by vertex-fan triangles and a
// tensor rule with n_1d^2 points per triangle.
double integrate_polygon(const std::vector<Point2> &loop,
                         const std::function<double(const Point2 &)> &f, int n_1d = 24);

// Integral of f along a segment.
double integrate_segment(const Point2 &a, const Point2 &b,
                         const std::function<double(const Point2 &)> &f, int n_1d = 24);

// Monomial coefficients of the Legendre polynomial P_n (index = power).
std::vector<double> legendre_monomial_coeffs(int n);

// Dense assemblies straight from the bilinear-form definitions, using the
// machinery above. Basis evaluation comes from DgSpace (validated separately
// against finite differences and box orthonormality).
Eigen::MatrixXd dense_mass(const polyfk::DgSpace &space);
Eigen::MatrixXd dense_linear_reaction(const polyfk::DgSpace &space,
                                      const polyfk::ModelParams &params, double t = 0.0);
Eigen::MatrixXd dense_nonlinear_reaction(const polyfk::DgSpace &space,
                                         const polyfk::ModelParams &params,
                                         const std::vector<double> &C_star, double t = 0.0);
Eigen::MatrixXd dense_stiffness(const polyfk::DgSpace &space, const polyfk::ModelParams &params,
                                const polyfk::PenaltySpec &spec, double t = 0.0);
Eigen::VectorXd dense_load(const polyfk::DgSpace &space, const polyfk::ModelParams &params,
                           const polyfk::PenaltySpec &spec, double t);

// ||sqrt(D) grad c_h||^2 and the penalty jump square of a DG field, dense route.
void dense_dg_norm_sq_parts(const polyfk::DgSpace &space, const polyfk::ModelParams &params,
                            const polyfk::PenaltySpec &spec, const std::vector<double> &C,
                            double &grad_sq, double &jump_sq);

Eigen::MatrixXd to_dense(const polyfk::SparseOperator &op);

} // namespace oracle
