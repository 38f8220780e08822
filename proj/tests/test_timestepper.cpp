#include <doctest.h>

#include <cmath>

#include "polyfk/analysis.hpp"
#include "polyfk/errors.hpp"
#include "polyfk/manufactured.hpp"
#include "polyfk/timestepper.hpp"

using namespace polyfk;

namespace {

const Rect unit_square{0, 0, 1, 1};

struct Problem {
  PolyMesh mesh;
  DgSpace space;
  SubTriangulation sub;
  AssemblyContext ctx;

  Problem(int n_cells, int p, const std::function<FaceKind(const Point2 &)> &classify)
      : mesh(generate_voronoi_mesh(unit_square, n_cells, 40, 77, classify)),
        space(mesh, p), sub(sub_triangulate(mesh)), ctx(space, sub) {}
};

double sup_diff(const StateVector &a, const StateVector &b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

} // namespace

TEST_CASE("steady states are preserved by both schemes") {
  Problem prob(12, 2, tag_all_neumann);
  ModelParams params;
  params.d_ext = FieldSpec::constant(1.0);
  params.alpha = FieldSpec::constant(1.0);

  StepperConfig config;
  config.dt = 0.05;
  config.t_final = 0.5;

  for (Scheme scheme : {Scheme::semi_implicit, Scheme::implicit}) {
    config.scheme = scheme;
    SUBCASE(scheme == Scheme::semi_implicit ? "semi-implicit" : "implicit") {
      const StateVector C0 = project_l2(prob.ctx, constant_field(0.0), 0.0);
      const Trajectory zero = integrate(C0, prob.ctx, params, {10.0}, config);
      CHECK(l2_norm(prob.ctx, zero.final_state()) <= 1e-12);

      const StateVector C1 = project_l2(prob.ctx, constant_field(1.0), 0.0);
      const Trajectory one = integrate(C1, prob.ctx, params, {10.0}, config);
      CHECK(l2_error(prob.ctx, one.final_state(), constant_field(1.0), 0.0) <= 1e-10);

      if (scheme == Scheme::implicit) {
        // Fixed points converge within two Picard iterations.
        for (const StepRecord &rec : one.records)
          CHECK(rec.picard_iterations <= 2);
      } else {
        for (const StepRecord &rec : one.records)
          CHECK(rec.linear_solves == 1);
      }
    }
  }
}

TEST_CASE("alpha = 0 makes the two schemes agree to solver tolerance") {
  Problem prob(10, 2, tag_all_dirichlet);
  const ManufacturedCase mcase = testcase1_with_alpha(0.0);
  const ModelParams params = mcase.params();

  StepperConfig config;
  config.dt = 0.01;
  config.t_final = 0.1;

  const StateVector C0 = project_l2(prob.ctx, params.initial, 0.0);
  config.scheme = Scheme::semi_implicit;
  const Trajectory semi = integrate(C0, prob.ctx, params, {10.0}, config);
  config.scheme = Scheme::implicit;
  const Trajectory impl = integrate(C0, prob.ctx, params, {10.0}, config);

  CHECK(sup_diff(semi.final_state(), impl.final_state()) <= 1e-11);
}

TEST_CASE("mass is conserved without reaction, forcing, or flux") {
  Problem prob(15, 2, tag_all_neumann);
  ModelParams params;
  params.d_ext = FieldSpec::constant(0.1);
  params.initial = [](const Point2 &x, double) {
    return 0.4 + 0.3 * std::cos(M_PI * x.x) * std::cos(2 * M_PI * x.y);
  };

  StepperConfig config;
  config.dt = 0.01;
  config.t_final = 1.0; // 100 steps
  config.scheme = Scheme::semi_implicit;

  Probes probes;
  probes.track_element_means = true;

  const StateVector C0 = project_l2(prob.ctx, params.initial, 0.0);
  const Trajectory traj = integrate(C0, prob.ctx, params, {10.0}, config, probes);
  REQUIRE(traj.records.size() == 100);

  auto total_mass = [&](const StateVector &C) {
    double mass = 0.0;
    for (int k = 0; k < prob.mesh.n_elements(); ++k)
      mass += prob.ctx.element_mean(k, C) * prob.mesh.element_areas[k];
    return mass;
  };
  const double m0 = total_mass(traj.states.front());
  for (const StateVector &state : traj.states)
    CHECK(std::abs(total_mass(state) - m0) <= 1e-10 * std::abs(m0));
}

TEST_CASE("temporal order two against an over-resolved reference") {
  // Linear problem (alpha = 0) on a fixed mesh: halving dt divides the
  // time-discretization error by four.
  Problem prob(30, 4, tag_all_dirichlet);
  const ManufacturedCase mcase = testcase1_with_alpha(0.0);
  const ModelParams params = mcase.params();

  StepperConfig config;
  config.scheme = Scheme::semi_implicit;
  config.t_final = 0.4;

  const StateVector C0 = project_l2(prob.ctx, params.initial, 0.0);

  config.dt = 0.0125; // t_final / 32
  const StateVector ref = integrate(C0, prob.ctx, params, {10.0}, config).final_state();

  config.dt = 0.2;
  const StateVector coarse = integrate(C0, prob.ctx, params, {10.0}, config).final_state();
  config.dt = 0.1;
  const StateVector fine = integrate(C0, prob.ctx, params, {10.0}, config).final_state();

  StateVector diff_coarse(ref.size()), diff_fine(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    diff_coarse[i] = coarse[i] - ref[i];
    diff_fine[i] = fine[i] - ref[i];
  }
  const double e_coarse = l2_norm(prob.ctx, diff_coarse);
  const double e_fine = l2_norm(prob.ctx, diff_fine);
  const double ratio = e_coarse / e_fine;
  CHECK(ratio >= 3.2);
  CHECK(ratio <= 4.8);
}

TEST_CASE("picard respects the iteration cap and flags non-convergence") {
  Problem prob(8, 1, tag_all_neumann);
  ModelParams params;
  params.d_ext = FieldSpec::constant(1e-3);
  params.alpha = FieldSpec::constant(1.0);
  params.initial = constant_field(0.5);

  StepperConfig config;
  config.dt = 0.1;
  config.t_final = 0.5;
  config.scheme = Scheme::implicit;
  config.picard_tol = 1e-30; // unreachable: must stop at the cap and continue
  config.picard_max_iter = 3;

  const StateVector C0 = project_l2(prob.ctx, params.initial, 0.0);
  const Trajectory traj = integrate(C0, prob.ctx, params, {10.0}, config);
  CHECK(traj.picard_nonconverged_steps == 5);
  for (const StepRecord &rec : traj.records)
    CHECK(rec.picard_iterations == 3);
  CHECK_FALSE(traj.aborted); // warn-and-continue policy
}

TEST_CASE("stride stores endpoints and every k-th state") {
  Problem prob(6, 1, tag_all_neumann);
  ModelParams params;
  params.d_ext = FieldSpec::constant(1.0);

  StepperConfig config;
  config.dt = 0.1;
  config.t_final = 1.0;
  config.store_stride = 3;

  const StateVector C0 = project_l2(prob.ctx, constant_field(1.0), 0.0);
  const Trajectory traj = integrate(C0, prob.ctx, params, {10.0}, config);
  REQUIRE(traj.times.size() == 5); // t = 0, 0.3, 0.6, 0.9, 1.0
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(1.0));
}

TEST_CASE("config validation") {
  StepperConfig config;
  config.dt = -1.0;
  config.t_final = 1.0;
  CHECK_THROWS_AS(config.validate(), ParseError); // dt <= 0
  config.dt = 0.3;
  config.t_final = 0.2;
  CHECK_THROWS_AS(config.validate(), ParseError); // t_final < dt
  config.t_final = 0.9;
  CHECK_NOTHROW(config.validate());
  config.picard_tol = 0.0;
  CHECK_THROWS_AS(config.validate(), ParseError);
}

TEST_CASE("t_final must be commensurate with dt") {
  Problem prob(4, 1, tag_all_neumann);
  ModelParams params;
  params.d_ext = FieldSpec::constant(1.0);
  StepperConfig config;
  config.dt = 0.3;
  config.t_final = 1.0;
  const StateVector C0(prob.space.n_dofs(), 0.0);
  CHECK_THROWS_AS(integrate(C0, prob.ctx, params, {10.0}, config), ParseError);
}
