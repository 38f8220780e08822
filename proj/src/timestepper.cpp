#include "polyfk/timestepper.hpp"

#include <cmath>

#include "polyfk/analysis.hpp"
#include "polyfk/errors.hpp"
#include "polyfk/kernels.hpp"

namespace polyfk {

void StepperConfig::validate() const {
  if (!(dt > 0.0))
    throw ParseError("dt must be positive");
  if (!(t_final >= dt))
    throw ParseError("t_final must be at least dt");
  if (!(picard_tol > 0.0))
    throw ParseError("picard_tol must be positive");
  if (picard_max_iter < 1)
    throw ParseError("picard_max_iter must be at least 1");
}

namespace {

double norm2(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

} // namespace

CrankNicolsonStepper::CrankNicolsonStepper(const AssemblyContext &ctx, const ModelParams &params,
                                           const PenaltySpec &spec, const StepperConfig &config)
    : ctx_(ctx), params_(params), spec_(spec), config_(config),
      M_tilde_(make_blockdiag_operator(ctx.space())), solver_(config.linear),
      operators_time_dependent_(params.time_dependent_operators()) {
  config_.validate();
  rebuild_operators(0.0);
}

void CrankNicolsonStepper::rebuild_operators(double t) {
  M_ = assemble_mass(ctx_);
  {
    const StiffnessResult stiff = assemble_stiffness(ctx_, params_, spec_, t);
    A_ = stiff.A;
  }
  M_alpha_ = assemble_linear_reaction(ctx_, params_, t);
  const SparseOperator AmMa = combine(A_, 1.0, M_alpha_, -1.0);
  S_plus_ = combine(M_, 1.0, AmMa, 0.5 * config_.dt);
  S_minus_ = combine(M_, 1.0, AmMa, -0.5 * config_.dt);
  solver_.set_frozen(S_plus_);
  operators_time_ = t;
}

StateVector CrankNicolsonStepper::solve_one(const StateVector &C_n, const StateVector &C_star,
                                            const StateVector &F_n, const StateVector &F_np1,
                                            double t_n, StepRecord &record) {
  if (operators_time_dependent_ && operators_time_ != t_n + 0.5 * config_.dt)
    rebuild_operators(t_n + 0.5 * config_.dt); // midpoint evaluation of slow coefficients

  assemble_nonlinear_reaction_into(ctx_, params_, C_star, M_tilde_,
                                   operators_time_dependent_ ? t_n + 0.5 * config_.dt : 0.0);

  // rhs = S_minus C_n - dt/2 M~ C_n + dt/2 (F_n + F_np1)
  StateVector rhs(C_n.size());
  S_minus_.multiply(C_n, rhs);
  M_tilde_.multiply_add(-0.5 * config_.dt, C_n, rhs);
  kernels::axpy(0.5 * config_.dt, F_n, rhs);
  kernels::axpy(0.5 * config_.dt, F_np1, rhs);

  StateVector out;
  try {
    out = solver_.solve(M_tilde_, 0.5 * config_.dt, rhs);
  } catch (const SolverError &err) {
    throw SolverError(std::string(err.what()) + " (at t = " + std::to_string(t_n) + ")");
  }
  ++record.linear_solves;
  return out;
}

StateVector CrankNicolsonStepper::step_semi_implicit(const StateVector &C_n,
                                                     const StateVector &C_nm1,
                                                     const StateVector &F_n,
                                                     const StateVector &F_np1, double t_n,
                                                     StepRecord &record) {
  StateVector C_star(C_n.size());
  for (std::size_t i = 0; i < C_n.size(); ++i)
    C_star[i] = 1.5 * C_n[i] - 0.5 * C_nm1[i];
  return solve_one(C_n, C_star, F_n, F_np1, t_n, record);
}

StateVector CrankNicolsonStepper::step_implicit(const StateVector &C_n, const StateVector &F_n,
                                                const StateVector &F_np1, double t_n,
                                                StepRecord &record) {
  StateVector C_k = C_n;
  StateVector C_star(C_n.size());
  record.picard_converged = false;
  for (int k = 0; k < config_.picard_max_iter; ++k) {
    for (std::size_t i = 0; i < C_n.size(); ++i)
      C_star[i] = 0.5 * (C_k[i] + C_n[i]);
    StateVector C_next = solve_one(C_n, C_star, F_n, F_np1, t_n, record);
    StateVector diff = C_next;
    kernels::axpy(-1.0, C_k, diff);
    record.picard_update = norm2(diff);
    record.picard_iterations = k + 1;
    C_k = std::move(C_next);
    if (record.picard_update <= config_.picard_tol) {
      record.picard_converged = true;
      break;
    }
  }
  return C_k;
}

Trajectory integrate(const StateVector &C0, const AssemblyContext &ctx,
                     const ModelParams &params, const PenaltySpec &spec,
                     const StepperConfig &config, const Probes &probes) {
  config.validate();
  if (static_cast<int>(C0.size()) != ctx.space().n_dofs())
    throw ContractViolation("integrate: initial state length mismatch");

  const int n_steps = static_cast<int>(std::llround(config.t_final / config.dt));
  if (std::abs(n_steps * config.dt - config.t_final) > 1e-9 * config.t_final)
    throw ParseError("t_final must be an integer multiple of dt");

  CrankNicolsonStepper stepper(ctx, params, spec, config);

  Trajectory traj;
  const int n_el = ctx.mesh().n_elements();

  auto store = [&](int step, double t, const StateVector &C) {
    traj.times.push_back(t);
    traj.states.push_back(C);
    if (probes.track_element_means) {
      std::vector<double> means(n_el);
      for (int k = 0; k < n_el; ++k)
        means[k] = ctx.element_mean(k, C);
      traj.element_means.push_back(std::move(means));
    }
    if (probes.on_store)
      probes.on_store(step, t, C);
  };

  auto error_integrand = [&](double t, const StateVector &C) {
    return dg_error_parts(ctx, params, spec, C, probes.error->exact, probes.error->exact_grad, t)
        .dg_norm_sq();
  };

  store(0, 0.0, C0);
  if (probes.error)
    traj.dg_error_sq.push_back(error_integrand(0.0, C0));
  if (probes.track_dg_norm)
    traj.dg_norm_sq.push_back(dg_norm_parts(ctx, params, spec, C0, 0.0).dg_norm_sq());

  StateVector C_prev = C0; // C^{n-1}; bootstrap C^{-1} := C^0
  StateVector C_n = C0;
  StateVector F_n = assemble_load(ctx, params, spec, 0.0);

  for (int n = 0; n < n_steps; ++n) {
    const double t_n = n * config.dt;
    const double t_np1 = (n + 1) * config.dt;
    StateVector F_np1 = assemble_load(ctx, params, spec, t_np1);

    StepRecord record;
    record.t = t_np1;
    StateVector C_np1;
    try {
      if (config.scheme == Scheme::semi_implicit)
        C_np1 = stepper.step_semi_implicit(C_n, n == 0 ? C_n : C_prev, F_n, F_np1, t_n, record);
      else
        C_np1 = stepper.step_implicit(C_n, F_n, F_np1, t_n, record);
    } catch (const SolverError &err) {
      traj.aborted = true;
      traj.abort_reason = err.what();
      traj.records.push_back(record);
      break;
    }
    if (!record.picard_converged && config.scheme == Scheme::implicit)
      ++traj.picard_nonconverged_steps;
    traj.records.push_back(record);

    if (probes.error) {
      const double e_sq = error_integrand(t_np1, C_np1);
      traj.dg_error_sq_integral += 0.5 * config.dt * (traj.dg_error_sq.back() + e_sq);
      traj.dg_error_sq.push_back(e_sq);
    }
    if (probes.track_dg_norm) {
      const double n_sq = dg_norm_parts(ctx, params, spec, C_np1, t_np1).dg_norm_sq();
      traj.dg_norm_sq_integral += 0.5 * config.dt * (traj.dg_norm_sq.back() + n_sq);
      traj.dg_norm_sq.push_back(n_sq);
    }

    C_prev = std::move(C_n);
    C_n = std::move(C_np1);
    F_n = std::move(F_np1);

    if ((n + 1) % config.store_stride == 0 || n + 1 == n_steps)
      store(n + 1, t_np1, C_n);
  }

  if (probes.error)
    traj.final_l2_error = l2_error(ctx, C_n, probes.error->exact, traj.times.back());
  traj.solve_stats = stepper.solve_stats();
  return traj;
}

} // namespace polyfk
