#include "polyfk/wavebench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyfk/errors.hpp"

namespace polyfk {

namespace {

double hermite(double f0, double d0, double f1, double d1, double h, double s) {
  // Cubic Hermite on [0,1] with derivatives scaled by the interval length.
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * f1 +
         (s3 - s2) * h * d1;
}

} // namespace

double WaveProfile::eval(double xi) const {
  if (xi <= xi0)
    return psi.front();
  if (xi >= xi_max())
    return psi.back();
  const double s = (xi - xi0) / dxi;
  const std::size_t i = std::min(static_cast<std::size_t>(s), psi.size() - 2);
  return hermite(psi[i], chi[i], psi[i + 1], chi[i + 1], dxi, s - static_cast<double>(i));
}

double WaveProfile::eval_chi(double xi) const {
  if (xi < xi0 || xi > xi_max())
    return 0.0; // clamped region is flat
  const double s = (xi - xi0) / dxi;
  const std::size_t i = std::min(static_cast<std::size_t>(s), chi.size() - 2);
  const double f = s - static_cast<double>(i);
  return (1.0 - f) * chi[i] + f * chi[i + 1];
}

WaveProfile integrate_wave_ode(double d_ext, double alpha, double v, double psi0, double chi0,
                               double xi_max, double tol) {
  if (!(d_ext > 0.0))
    throw ParseError("integrate_wave_ode: d_ext must be positive");
  if (!(tol > 0.0))
    throw ParseError("integrate_wave_ode: tol must be positive");

  struct State {
    double psi, chi;
  };
  const auto rhs = [&](const State &s) -> State {
    return {s.chi, -(v / d_ext) * s.chi + (alpha / d_ext) * s.psi * (s.psi - 1.0)};
  };

  // Dormand-Prince 5(4) coefficients.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::vector<double> xs = {0.0};
  std::vector<State> ys = {{psi0, chi0}};
  std::vector<State> ds = {rhs(ys[0])};

  double x = 0.0;
  State y{psi0, chi0};
  State k1 = rhs(y);
  // Stiffest local scale is v/d_ext; start well inside the stability region.
  double h = std::min(xi_max / 100.0, 0.1 * d_ext / std::max(v, 1e-12));
  const double h_min = xi_max * 1e-14;

  while (x < xi_max) {
    h = std::min(h, xi_max - x);
    const State k2 = rhs({y.psi + h * a21 * k1.psi, y.chi + h * a21 * k1.chi});
    const State k3 = rhs({y.psi + h * (a31 * k1.psi + a32 * k2.psi),
                          y.chi + h * (a31 * k1.chi + a32 * k2.chi)});
    const State k4 = rhs({y.psi + h * (a41 * k1.psi + a42 * k2.psi + a43 * k3.psi),
                          y.chi + h * (a41 * k1.chi + a42 * k2.chi + a43 * k3.chi)});
    const State k5 =
        rhs({y.psi + h * (a51 * k1.psi + a52 * k2.psi + a53 * k3.psi + a54 * k4.psi),
             y.chi + h * (a51 * k1.chi + a52 * k2.chi + a53 * k3.chi + a54 * k4.chi)});
    const State k6 = rhs(
        {y.psi + h * (a61 * k1.psi + a62 * k2.psi + a63 * k3.psi + a64 * k4.psi + a65 * k5.psi),
         y.chi + h * (a61 * k1.chi + a62 * k2.chi + a63 * k3.chi + a64 * k4.chi + a65 * k5.chi)});
    const State y5{y.psi + h * (b1 * k1.psi + b3 * k3.psi + b4 * k4.psi + b5 * k5.psi + b6 * k6.psi),
                   y.chi + h * (b1 * k1.chi + b3 * k3.chi + b4 * k4.chi + b5 * k5.chi + b6 * k6.chi)};
    const State k7 = rhs(y5);
    const double err_psi =
        h * (e1 * k1.psi + e3 * k3.psi + e4 * k4.psi + e5 * k5.psi + e6 * k6.psi + e7 * k7.psi);
    const double err_chi =
        h * (e1 * k1.chi + e3 * k3.chi + e4 * k4.chi + e5 * k5.chi + e6 * k6.chi + e7 * k7.chi);
    const double scale = tol * (1.0 + std::max(std::abs(y.psi), std::abs(y5.psi)));
    const double err = std::hypot(err_psi, err_chi) / scale;

    if (err <= 1.0) {
      x += h;
      y = y5;
      k1 = k7; // FSAL
      xs.push_back(x);
      ys.push_back(y);
      ds.push_back(k7);
      if (std::abs(y.psi) > 10.0)
        throw SolverError("wave ODE blow-up at xi = " + std::to_string(x));
    }
    const double factor =
        err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
    h *= factor;
    if (h < h_min)
      throw SolverError("wave ODE step size underflow at xi = " + std::to_string(x));
  }

  // Resample on a uniform grid via Hermite interpolation of accepted steps.
  WaveProfile profile;
  profile.speed = v;
  profile.xi0 = 0.0;
  const int n_samples = 20001;
  profile.dxi = xi_max / (n_samples - 1);
  profile.psi.resize(n_samples);
  profile.chi.resize(n_samples);
  std::size_t seg = 0;
  for (int i = 0; i < n_samples; ++i) {
    const double xi = profile.dxi * i;
    while (seg + 2 < xs.size() && xs[seg + 1] < xi)
      ++seg;
    const double hseg = xs[seg + 1] - xs[seg];
    const double s = (xi - xs[seg]) / hseg;
    profile.psi[i] = hermite(ys[seg].psi, ds[seg].psi, ys[seg + 1].psi, ds[seg + 1].psi, hseg, s);
    profile.chi[i] = hermite(ys[seg].chi, ds[seg].chi, ys[seg + 1].chi, ds[seg + 1].chi, hseg, s);
  }
  return profile;
}

double wave_exact(const WaveProfile &profile, const Point2 &x, double t) {
  return profile.eval(x.x - profile.speed * t);
}

double front_position(const PolyMesh &mesh, const std::vector<double> &element_means,
                      double level) {
  struct Sample {
    double x, c;
  };
  std::vector<Sample> band;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const Point2 c = mesh.element_centroid(k);
    if (c.y > 0.25 && c.y < 0.75)
      band.push_back({c.x, element_means[k]});
  }
  std::sort(band.begin(), band.end(), [](const Sample &a, const Sample &b) { return a.x < b.x; });
  for (std::size_t i = 0; i + 1 < band.size(); ++i) {
    if (band[i].c >= level && band[i + 1].c < level) {
      const double f = (band[i].c - level) / (band[i].c - band[i + 1].c);
      return band[i].x + f * (band[i + 1].x - band[i].x);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double fit_front_speed(const WaveBenchmarkResult &result, double t_begin, double t_end) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < result.front_times.size(); ++i) {
    const double t = result.front_times[i];
    const double x = result.front_positions[i];
    if (t < t_begin || t > t_end || std::isnan(x))
      continue;
    sx += t;
    sy += x;
    sxx += t * t;
    sxy += t * x;
    ++n;
  }
  if (n < 2)
    throw ContractViolation("fit_front_speed: fewer than two tracked front positions");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

WaveBenchmarkResult run_wave_benchmark(const WaveBenchmarkConfig &config) {
  WaveBenchmarkResult result;
  result.profile = integrate_wave_ode(config.d_ext, config.alpha, config.speed, config.psi0,
                                      config.chi0, config.xi_max);
  const WaveProfile &profile = result.profile;

  const Rect domain{0.0, 0.0, 5.0, 1.0};
  const auto classify = [&](const Point2 &mid) {
    const double tol = 1e-9;
    if (std::abs(mid.x - domain.x0) < tol || std::abs(mid.x - domain.x1) < tol)
      return FaceKind::dirichlet;
    return FaceKind::neumann;
  };
  const PolyMesh mesh = generate_voronoi_mesh(domain, config.n_elements, config.lloyd_iterations,
                                              config.mesh_seed, classify);

  ModelParams params;
  params.d_ext = FieldSpec::constant(config.d_ext);
  params.alpha = FieldSpec::constant(config.alpha);
  params.dirichlet = [&profile](const Point2 &x, double t) { return wave_exact(profile, x, t); };
  params.initial = [&profile](const Point2 &x, double) { return wave_exact(profile, x, 0.0); };

  DgSpace space(mesh, config.degree);
  const SubTriangulation sub = sub_triangulate(mesh);
  AssemblyContext ctx(space, sub);

  StepperConfig stepcfg;
  stepcfg.dt = config.dt;
  stepcfg.t_final = config.t_final;
  stepcfg.scheme = config.scheme;
  stepcfg.store_stride = config.store_stride;

  Probes probes;
  probes.track_element_means = true;

  const PenaltySpec spec{config.eta0};
  const StateVector C0 = project_l2(ctx, params.initial, 0.0);
  result.trajectory = integrate(C0, ctx, params, spec, stepcfg, probes);

  result.l2_error_at_T =
      l2_error(ctx, result.trajectory.final_state(),
               [&profile](const Point2 &x, double t) { return wave_exact(profile, x, t); },
               result.trajectory.final_time());

  result.front_times = result.trajectory.times;
  result.front_positions.reserve(result.front_times.size());
  for (const auto &means : result.trajectory.element_means)
    result.front_positions.push_back(front_position(mesh, means, 0.5));
  return result;
}

} // namespace polyfk
