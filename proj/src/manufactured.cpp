#include "polyfk/manufactured.hpp"

#include <cmath>

namespace polyfk {

ModelParams ManufacturedCase::params() const {
  ModelParams p;
  p.d_ext = FieldSpec::constant(d_ext);
  p.alpha = FieldSpec::constant(alpha);
  p.forcing = forcing;
  p.dirichlet = exact;
  p.neumann = constant_field(0.0);
  const ScalarField c = exact;
  p.initial = [c](const Point2 &x, double) { return c(x, 0.0); };
  return p;
}

ManufacturedCase testcase1_with_alpha(double alpha) {
  ManufacturedCase mc;
  mc.d_ext = 1.0;
  mc.alpha = alpha;
  mc.exact = [](const Point2 &p, double t) {
    return (std::cos(M_PI * p.x) * std::cos(M_PI * p.y) + 2.0) * std::exp(-t);
  };
  mc.exact_grad = [](const Point2 &p, double t) {
    const double e = std::exp(-t) * M_PI;
    return Point2{-e * std::sin(M_PI * p.x) * std::cos(M_PI * p.y),
                  -e * std::cos(M_PI * p.x) * std::sin(M_PI * p.y)};
  };
  // f = dc/dt - d_ext lap(c) - alpha c (1 - c) with
  // dc/dt = -c and lap(c) = -2 pi^2 (c - 2 e^{-t}).
  const double d_ext = mc.d_ext;
  mc.forcing = [alpha, d_ext](const Point2 &p, double t) {
    const double et = std::exp(-t);
    const double c = (std::cos(M_PI * p.x) * std::cos(M_PI * p.y) + 2.0) * et;
    return -c + 2.0 * M_PI * M_PI * d_ext * (c - 2.0 * et) - alpha * c * (1.0 - c);
  };
  return mc;
}

ManufacturedCase testcase1() { return testcase1_with_alpha(1.0); }

ConvergenceStudy run_convergence(const ManufacturedCase &mcase,
                                 const std::vector<const PolyMesh *> &meshes,
                                 const std::vector<int> &p_list, double dt, double t_final,
                                 Scheme scheme, const PenaltySpec &spec) {
  ConvergenceStudy study;
  const ModelParams params = mcase.params();

  std::vector<std::vector<double>> errors(p_list.size(), std::vector<double>(meshes.size()));
  for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
    ConvergenceRun run;
    run.p = p_list[ip];
    for (std::size_t im = 0; im < meshes.size(); ++im) {
      const PolyMesh &mesh = *meshes[im];
      params.validate(mesh);
      DgSpace space(mesh, p_list[ip]);
      const SubTriangulation sub = sub_triangulate(mesh);
      AssemblyContext ctx(space, sub);

      StepperConfig config;
      config.dt = dt;
      config.t_final = t_final;
      config.scheme = scheme;

      Probes probes;
      probes.error = ErrorProbe{mcase.exact, mcase.exact_grad};

      const StateVector C0 = project_l2(ctx, params.initial, 0.0);
      const Trajectory traj = integrate(C0, ctx, params, spec, config, probes);
      errors[ip][im] = energy_error(traj);
      run.by_mesh.rows.push_back({mesh.mesh_size, space.n_dofs(), errors[ip][im]});
    }
    convergence_rates(run.by_mesh);
    study.h_sweeps.push_back(std::move(run));
  }

  for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
    const int n_local = (p_list[ip] + 1) * (p_list[ip] + 2) / 2;
    study.p_sweep.rows.push_back({static_cast<double>(p_list[ip]),
                                  meshes.front()->n_elements() * n_local, errors[ip][0]});
  }
  return study;
}

} // namespace polyfk
