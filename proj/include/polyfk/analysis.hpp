#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "polyfk/timestepper.hpp"

namespace polyfk {

// Pieces of the broken norm: ||sqrt(D) grad_h v|| and ||sqrt(eta) [[v]]||
// over interior and Dirichlet faces. The paper's DG norm is the SUM of the
// two contributions, not the root of the squared sum.
struct DgNormParts {
  double grad_sq = 0.0;
  double jump_sq = 0.0;

  double dg_norm() const;
  double dg_norm_sq() const;
};

// DG norm pieces of the coefficient field itself (Dirichlet jumps use g=0).
DgNormParts dg_norm_parts(const AssemblyContext &ctx, const ModelParams &params,
                          const PenaltySpec &spec, const StateVector &C, double t = 0.0);
double dg_norm(const AssemblyContext &ctx, const ModelParams &params, const PenaltySpec &spec,
               const StateVector &C, double t = 0.0);

// DG norm pieces of c_h - exact; interior jumps of the exact solution cancel,
// Dirichlet jumps are (c_h - exact).
DgNormParts dg_error_parts(const AssemblyContext &ctx, const ModelParams &params,
                           const PenaltySpec &spec, const StateVector &C,
                           const ScalarField &exact, const VectorField &exact_grad, double t);

double l2_norm(const AssemblyContext &ctx, const StateVector &C);
double l2_error(const AssemblyContext &ctx, const StateVector &C, const ScalarField &exact,
                double t);

struct NormReport {
  double t = 0.0;
  double l2 = 0.0;
  double dg = 0.0;
  double energy = 0.0; // sqrt(l2(t)^2 + int_0^t ||.||_DG^2)
};

// Energy norm of the error at the trajectory's final time: requires the
// trajectory to have stored the per-step DG error integrand (error probe on).
double energy_error(const Trajectory &traj);

// Recomputes the energy error from the stored states (stride must be 1).
double energy_error(const Trajectory &traj, const AssemblyContext &ctx,
                    const ModelParams &params, const PenaltySpec &spec, const ScalarField &exact,
                    const VectorField &exact_grad);

struct RateRow {
  double refinement = 0.0; // h (mesh size) or p (degree)
  int n_dofs = 0;
  double error = 0.0;
  double rate = std::numeric_limits<double>::quiet_NaN();
};

struct RateTable {
  std::vector<RateRow> rows;
};

// Slopes log(e_i/e_{i+1}) / log(h_i/h_{i+1}) between consecutive rows; zero
// error rows are skipped with a NaN slope.
void convergence_rates(RateTable &table);

// Least-squares slope of log(error) against the refinement column, with R^2.
struct LogFit {
  double slope = 0.0;
  double r_squared = 0.0;
};
LogFit log_error_fit(const RateTable &table);

void write_rate_csv(const RateTable &table, std::ostream &out);

struct ActivationField {
  double c_crit = 0.95;
  std::vector<double> t_hat; // per element; +inf where never crossed
};

// First stored time at which the element mean exceeds c_crit.
ActivationField activation_time(const Trajectory &traj, double c_crit = 0.95);
void write_activation_csv(const ActivationField &field, std::ostream &out);

// Area-weighted mean over a set of elements at every stored time.
std::vector<double> region_mean(const Trajectory &traj, const PolyMesh &mesh,
                                const std::vector<int> &region);
void write_series_csv(const std::vector<double> &times, const std::vector<double> &values,
                      const char *value_name, std::ostream &out);

} // namespace polyfk
