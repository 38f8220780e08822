#pragma once

#include <vector>

#include "polyfk/analysis.hpp"
#include "polyfk/timestepper.hpp"

namespace polyfk {

// Traveling-wave profile psi(xi) with chi = psi', sampled on a uniform xi
// grid and interpolated with a cubic Hermite rule (chi supplies the exact
// slopes). Outside the sampled range the profile is clamped to its endpoint
// values, where it is flat.
struct WaveProfile {
  double speed = 0.0;
  double xi0 = 0.0;
  double dxi = 0.0;
  std::vector<double> psi;
  std::vector<double> chi;

  double xi_max() const { return xi0 + dxi * (static_cast<double>(psi.size()) - 1.0); }
  double eval(double xi) const;
  double eval_chi(double xi) const;
};

// Integrates the moving-frame system
//   chi' = -(v/d_ext) chi + (alpha/d_ext) psi (psi - 1),  psi' = chi
// with an adaptive Dormand-Prince 5(4) pair at local tolerance `tol` and
// samples the dense output. Throws SolverError when |psi| exceeds 10
// (blow-up) before xi_max.
WaveProfile integrate_wave_ode(double d_ext, double alpha, double v, double psi0, double chi0,
                               double xi_max, double tol = 1e-10);

// c(x, y, t) = psi(x - v t), independent of y.
double wave_exact(const WaveProfile &profile, const Point2 &x, double t);

struct WaveBenchmarkConfig {
  int n_elements = 300;
  int lloyd_iterations = 100;
  std::uint64_t mesh_seed = 42;
  int degree = 3;
  double dt = 0.01;
  double t_final = 5.0;
  Scheme scheme = Scheme::semi_implicit;
  double eta0 = 10.0;
  double d_ext = 1e-3;
  double alpha = 1.0;
  double speed = 0.1;
  double psi0 = 1.0;
  double chi0 = -1e-2;
  double xi_max = 50.0;
  int store_stride = 10;
};

struct WaveBenchmarkResult {
  double l2_error_at_T = 0.0;
  std::vector<double> front_times;
  std::vector<double> front_positions; // x of the 0.5 level on the midline band
  Trajectory trajectory;
  WaveProfile profile;
};

// Least-squares slope of the front position over times in [t_begin, t_end].
double fit_front_speed(const WaveBenchmarkResult &result, double t_begin, double t_end);

// Domain (0,5) x (0,1); Dirichlet from the wave profile at x = 0 and x = 5,
// homogeneous Neumann on the lateral sides (the profile has no y dependence).
WaveBenchmarkResult run_wave_benchmark(const WaveBenchmarkConfig &config);

// Front tracking helper: linear interpolation of element-mean values at the
// `level` crossing along x-sorted centroids inside the midline band.
double front_position(const PolyMesh &mesh, const std::vector<double> &element_means,
                      double level);

} // namespace polyfk
