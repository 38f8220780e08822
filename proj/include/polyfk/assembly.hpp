#pragma once

#include <vector>

#include "polyfk/dgspace.hpp"
#include "polyfk/mesh.hpp"
#include "polyfk/physics.hpp"
#include "polyfk/quadrature.hpp"
#include "polyfk/sparse.hpp"

namespace polyfk {

// Interior-penalty weight, eta_0 p^2 / {h}_H with the harmonic average of the
// neighboring diameters, eta_0 p^2 / h_K on Dirichlet faces.
struct PenaltySpec {
  double eta0 = 10.0;
};

double penalty(const PolyMesh &mesh, const Face &face, const DgSpace &space,
               const PenaltySpec &spec);

// Quadrature rules plus cached basis values/gradients at all volume points
// and basis traces at all face points. Built once per (space, order) and
// shared read-only by assembly, projection and error evaluation.
class AssemblyContext {
public:
  AssemblyContext(const DgSpace &space, const SubTriangulation &sub, int order = -1);

  const DgSpace &space() const { return *space_; }
  const PolyMesh &mesh() const { return space_->mesh(); }
  int order() const { return order_; }

  int n_qp(int element) const { return static_cast<int>(elem_w_[element].size()); }
  const std::vector<Point2> &points(int element) const { return elem_pts_[element]; }
  const std::vector<double> &weights(int element) const { return elem_w_[element]; }
  // Basis values at volume point q, contiguous n_local values.
  const double *values(int element, int q) const;
  const double *grad_x(int element, int q) const;
  const double *grad_y(int element, int q) const;

  int n_face_qp(int face) const { return static_cast<int>(face_w_[face].size()); }
  const std::vector<Point2> &face_points(int face) const { return face_pts_[face]; }
  const std::vector<double> &face_weights(int face) const { return face_w_[face]; }
  // Basis traces from the plus/minus side at face point q.
  const double *face_values(int face, int side, int q) const;

  double element_mean(int element, const StateVector &C) const;
  // \int_K phi_i, used for element means and mass audits.
  const std::vector<double> &basis_integrals(int element) const { return basis_int_[element]; }

private:
  const DgSpace *space_;
  int order_;
  std::vector<std::vector<Point2>> elem_pts_;
  std::vector<std::vector<double>> elem_w_;
  std::vector<std::vector<double>> elem_vals_, elem_gx_, elem_gy_;
  std::vector<std::vector<double>> basis_int_;
  std::vector<std::vector<Point2>> face_pts_;
  std::vector<std::vector<double>> face_w_;
  std::vector<std::vector<double>> face_vals_[2];
};

// Pattern helpers. Block-diagonal for mass/reaction operators, block
// diagonal plus face-neighbor coupling for the stiffness.
SparseOperator make_blockdiag_operator(const DgSpace &space);
SparseOperator make_sipg_operator(const DgSpace &space);

SparseOperator assemble_mass(const AssemblyContext &ctx);

SparseOperator assemble_linear_reaction(const AssemblyContext &ctx, const ModelParams &params,
                                        double t = 0.0);

// M~_alpha(C*); `into` must carry the block-diagonal pattern.
void assemble_nonlinear_reaction_into(const AssemblyContext &ctx, const ModelParams &params,
                                      const StateVector &C_star, SparseOperator &into,
                                      double t = 0.0);
SparseOperator assemble_nonlinear_reaction(const AssemblyContext &ctx, const ModelParams &params,
                                           const StateVector &C_star, double t = 0.0);

struct StiffnessResult {
  SparseOperator A;
  StateVector dirichlet_load; // RHS contribution of non-homogeneous c_D at time t
};

StiffnessResult assemble_stiffness(const AssemblyContext &ctx, const ModelParams &params,
                                   const PenaltySpec &spec, double t = 0.0);

// Dirichlet lifting only (the load part of assemble_stiffness), for
// time-dependent boundary data.
StateVector assemble_dirichlet_load(const AssemblyContext &ctx, const ModelParams &params,
                                    const PenaltySpec &spec, double t);

// Volume forcing + Neumann flux + Dirichlet lifting at time t.
StateVector assemble_load(const AssemblyContext &ctx, const ModelParams &params,
                          const PenaltySpec &spec, double t);

// Element-local L2 projection; reproduces polynomials of degree <= p.
StateVector project_l2(const AssemblyContext &ctx, const ScalarField &g, double t = 0.0);

} // namespace polyfk
