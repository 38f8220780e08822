#pragma once

#include <vector>

#include "polyfk/analysis.hpp"
#include "polyfk/timestepper.hpp"

namespace polyfk {

// Closed-form space-time solution with the forcing that makes it satisfy the
// reaction-diffusion equation exactly (isotropic diffusion d_ext, reaction
// coefficient alpha).
struct ManufacturedCase {
  ScalarField exact;
  VectorField exact_grad;
  ScalarField forcing;
  double d_ext = 1.0;
  double alpha = 1.0;

  // Model with Dirichlet data and initial condition taken from the exact
  // solution; boundary tagging is the mesh's.
  ModelParams params() const;
};

// c(x,y,t) = (cos(pi x) cos(pi y) + 2) e^{-t} with d_ext = 1, alpha = 1.
ManufacturedCase testcase1();

// Same solution with a caller-chosen reaction coefficient (alpha = 0 gives
// the linear problem used for the temporal-order check).
ManufacturedCase testcase1_with_alpha(double alpha);

struct ConvergenceRun {
  int p = 0;
  RateTable by_mesh; // rows over the mesh list (refinement column = h)
};

struct ConvergenceStudy {
  std::vector<ConvergenceRun> h_sweeps; // one per degree
  RateTable p_sweep;                    // error vs p on the first mesh
};

// Energy-norm errors at final time for each (mesh, degree) pair.
ConvergenceStudy run_convergence(const ManufacturedCase &mcase,
                                 const std::vector<const PolyMesh *> &meshes,
                                 const std::vector<int> &p_list, double dt, double t_final,
                                 Scheme scheme, const PenaltySpec &spec = {});

} // namespace polyfk
