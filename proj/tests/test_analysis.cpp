#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracle.hpp"
#include "polyfk/analysis.hpp"
#include "polyfk/errors.hpp"

using namespace polyfk;

namespace {

const Rect unit_square{0, 0, 1, 1};

} // namespace

TEST_CASE("dg norm of a constant field vanishes under pure Neumann") {
  const PolyMesh m = generate_voronoi_mesh(unit_square, 12, 40, 4, tag_all_neumann);
  ModelParams params;
  params.d_ext = FieldSpec::constant(1.0);
  const DgSpace space(m, 2);
  const AssemblyContext ctx(space, sub_triangulate(m));
  const StateVector C = project_l2(ctx, constant_field(3.0), 0.0);
  CHECK(dg_norm(ctx, params, {10.0}, C) <= 1e-11);
}

TEST_CASE("dg norm of c = x with a conforming representation is 1") {
  const PolyMesh m = generate_cartesian_mesh(unit_square, 3, 2, tag_all_neumann);
  ModelParams params;
  params.d_ext = FieldSpec::constant(1.0);
  const DgSpace space(m, 1);
  const AssemblyContext ctx(space, sub_triangulate(m));
  const StateVector C = project_l2(ctx, [](const Point2 &x, double) { return x.x; }, 0.0);
  CHECK(dg_norm(ctx, params, {10.0}, C) == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("dg norm matches the dense oracle on a 2-element mesh") {
  const PolyMesh m = generate_cartesian_mesh(unit_square, 2, 1);
  ModelParams params;
  params.d_ext = FieldSpec::constant(1.3);
  const DgSpace space(m, 2);
  const AssemblyContext ctx(space, sub_triangulate(m));
  const PenaltySpec spec{10.0};

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  StateVector C(space.n_dofs());
  for (double &c : C)
    c = u(rng);

  const DgNormParts parts = dg_norm_parts(ctx, params, spec, C);
  double grad_sq = 0.0, jump_sq = 0.0;
  oracle::dense_dg_norm_sq_parts(space, params, spec, C, grad_sq, jump_sq);
  CHECK(parts.grad_sq == doctest::Approx(grad_sq).epsilon(1e-11));
  CHECK(parts.jump_sq == doctest::Approx(jump_sq).epsilon(1e-11));
}

TEST_CASE("l2 error basics") {
  const PolyMesh m = generate_voronoi_mesh(unit_square, 10, 40, 4);
  const DgSpace space(m, 2);
  const AssemblyContext ctx(space, sub_triangulate(m));

  // Projection of a representable function reproduces it.
  const auto quad = [](const Point2 &x, double) { return x.x * x.x - 0.3 * x.y; };
  const StateVector C = project_l2(ctx, quad, 0.0);
  CHECK(l2_error(ctx, C, quad, 0.0) <= 1e-11);

  const StateVector zero(space.n_dofs(), 0.0);
  CHECK(l2_error(ctx, zero, constant_field(1.0), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("energy error of the zero solution against kappa e^{-t}") {
  const PolyMesh m = generate_cartesian_mesh(unit_square, 2, 2, tag_all_dirichlet);
  ModelParams params;
  params.d_ext = FieldSpec::constant(1.0);
  const DgSpace space(m, 1);
  const AssemblyContext ctx(space, sub_triangulate(m));
  const PenaltySpec spec{10.0};

  const double kappa = 0.7, T = 0.5;
  const auto exact = [kappa](const Point2 &, double t) { return kappa * std::exp(-t); };
  const auto exact_grad = [](const Point2 &, double) { return Point2{0.0, 0.0}; };

  Trajectory traj;
  const int n_steps = 200;
  for (int n = 0; n <= n_steps; ++n) {
    traj.times.push_back(T * n / n_steps);
    traj.states.emplace_back(space.n_dofs(), 0.0);
  }
  const double computed = energy_error(traj, ctx, params, spec, exact, exact_grad);

  // Closed form: ||e(T)||^2 = kappa^2 e^{-2T} |Omega|; the DG part is the
  // Dirichlet penalty of the trace, sum_F eta |F| kappa^2 e^{-2s} integrated.
  double eta_face_sum = 0.0;
  for (const Face &f : m.faces)
    if (f.is_boundary())
      eta_face_sum += penalty(m, f, space, spec) * f.length;
  const double dg_integral = [&] {
    // ||e||_DG = sqrt(jump_sq): grad part is zero.
    return eta_face_sum * kappa * kappa * 0.5 * (1.0 - std::exp(-2.0 * T));
  }();
  const double expected =
      std::sqrt(kappa * kappa * std::exp(-2.0 * T) + dg_integral);
  CHECK(computed == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("energy error is zero when the exact solution is the discrete one") {
  const PolyMesh m = generate_cartesian_mesh(unit_square, 2, 2, tag_all_dirichlet);
  ModelParams params;
  params.d_ext = FieldSpec::constant(1.0);
  const DgSpace space(m, 2);
  const AssemblyContext ctx(space, sub_triangulate(m));

  const auto exact = [](const Point2 &x, double) { return 1.0 + x.x + 2.0 * x.y; };
  const auto exact_grad = [](const Point2 &, double) { return Point2{1.0, 2.0}; };
  Trajectory traj;
  for (int n = 0; n <= 4; ++n) {
    traj.times.push_back(0.25 * n);
    traj.states.push_back(project_l2(ctx, exact, 0.0));
  }
  CHECK(energy_error(traj, ctx, params, {10.0}, exact, exact_grad) <= 1e-10);
}

TEST_CASE("convergence rate computation") {
  RateTable t;
  t.rows = {{1.0, 10, 1.0}, {0.5, 40, 0.25}};
  convergence_rates(t);
  CHECK(std::isnan(t.rows[0].rate));
  CHECK(t.rows[1].rate == doctest::Approx(2.0).epsilon(1e-12));

  RateTable cubic;
  for (double h : {1.0, 0.61, 0.37, 0.2})
    cubic.rows.push_back({h, 0, 5.0 * h * h * h});
  convergence_rates(cubic);
  for (std::size_t i = 1; i < cubic.rows.size(); ++i)
    CHECK(cubic.rows[i].rate == doctest::Approx(3.0).epsilon(1e-12));

  // Slope invariance under uniform error scaling.
  RateTable scaled = cubic;
  for (auto &row : scaled.rows)
    row.error *= 77.0;
  convergence_rates(scaled);
  for (std::size_t i = 1; i < scaled.rows.size(); ++i)
    CHECK(scaled.rows[i].rate == doctest::Approx(cubic.rows[i].rate).epsilon(1e-12));

  RateTable with_zero;
  with_zero.rows = {{1.0, 0, 1.0}, {0.5, 0, 0.0}, {0.25, 0, 0.1}};
  convergence_rates(with_zero);
  CHECK(std::isnan(with_zero.rows[1].rate)); // zero rows excluded
}

TEST_CASE("log-error fit") {
  RateTable t;
  for (int p = 1; p <= 5; ++p)
    t.rows.push_back({static_cast<double>(p), 0, 10.0 * std::exp(-1.7 * p)});
  const LogFit fit = log_error_fit(t);
  CHECK(fit.slope == doctest::Approx(-1.7).epsilon(1e-10));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rate csv layout") {
  RateTable t;
  t.rows = {{1.0, 10, 1.0}, {0.5, 40, 0.25}};
  convergence_rates(t);
  std::ostringstream out;
  write_rate_csv(t, out);
  CHECK(out.str().rfind("h,ndofs,error,rate\n", 0) == 0);
  CHECK(out.str().find("0.5,40,0.25,2") != std::string::npos);
}

TEST_CASE("activation times") {
  Trajectory traj;
  traj.times = {0.0, 1.0, 2.0};
  traj.element_means = {{0.99, 0.1}, {0.99, 0.5}, {0.99, 0.97}};

  SUBCASE("above threshold from the start gives t_hat = 0") {
    const ActivationField f = activation_time(traj, 0.95);
    CHECK(f.t_hat[0] == 0.0);
    CHECK(f.t_hat[1] == 2.0);
  }
  SUBCASE("never crossing gives +inf") {
    Trajectory zero;
    zero.times = {0.0, 1.0};
    zero.element_means = {{0.0, 0.0}, {0.0, 0.0}};
    const ActivationField f = activation_time(zero, 0.95);
    CHECK(std::isinf(f.t_hat[0]));
    CHECK(std::isinf(f.t_hat[1]));
  }
  SUBCASE("raising the threshold never lowers activation times") {
    const ActivationField lo = activation_time(traj, 0.3);
    const ActivationField hi = activation_time(traj, 0.9);
    for (std::size_t k = 0; k < lo.t_hat.size(); ++k)
      CHECK(hi.t_hat[k] >= lo.t_hat[k]);
  }
}

TEST_CASE("activation csv marks unreached elements with inf") {
  Trajectory traj;
  traj.times = {0.0};
  traj.element_means = {{1.0, 0.0}};
  const ActivationField f = activation_time(traj, 0.95);
  std::ostringstream out;
  write_activation_csv(f, out);
  CHECK(out.str().find("0,0") != std::string::npos);
  CHECK(out.str().find("1,inf") != std::string::npos);
}

TEST_CASE("region means") {
  const PolyMesh m = generate_cartesian_mesh(unit_square, 2, 1);
  Trajectory traj;
  traj.times = {0.0, 1.0};
  traj.element_means = {{1.0, 1.0}, {2.0, 4.0}};

  const std::vector<double> whole = region_mean(traj, m, {0, 1});
  CHECK(whole[0] == doctest::Approx(1.0));
  CHECK(whole[1] == doctest::Approx(3.0)); // equal areas

  CHECK_THROWS_AS(region_mean(traj, m, {}), ContractViolation);
}

TEST_CASE("norm report invariant: energy squared dominates l2 squared") {
  // By construction energy^2 = l2^2 + integral of a non-negative quantity.
  Trajectory traj;
  traj.dg_error_sq = {0.1, 0.2};
  traj.dg_error_sq_integral = 0.05;
  traj.final_l2_error = 0.3;
  const double e = energy_error(traj);
  CHECK(e * e >= traj.final_l2_error * traj.final_l2_error);
}
