#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polyfk/assembly.hpp"
#include "polyfk/solver.hpp"

namespace polyfk {

enum class Scheme { semi_implicit, implicit };

struct StepperConfig {
  double dt = 0.0;
  double t_final = 0.0;
  Scheme scheme = Scheme::semi_implicit;
  double picard_tol = 1e-10; // absolute update norm
  int picard_max_iter = 20;
  LinearSolverConfig linear;
  int store_stride = 1; // keep every k-th state (t=0 and T always kept)

  void validate() const;
};

struct StepRecord {
  double t = 0.0;
  int picard_iterations = 0;  // 0 for semi-implicit steps
  double picard_update = 0.0; // last Picard update norm
  bool picard_converged = true;
  int linear_solves = 0;
};

// Exact-solution probe; when present the stepper accumulates the squared DG
// norm of the error at every step (trapezoidal in time), the time integral
// entering the energy error.
struct ErrorProbe {
  ScalarField exact;
  VectorField exact_grad;
};

struct Probes {
  std::optional<ErrorProbe> error;
  bool track_element_means = false;
  bool track_dg_norm = false; // accumulate int ||c_h||_DG^2 too
  std::function<void(int step, double t, const StateVector &)> on_store;
};

struct Trajectory {
  std::vector<double> times;       // stored (strided) times
  std::vector<StateVector> states; // matching states
  std::vector<std::vector<double>> element_means;
  std::vector<StepRecord> records; // one per executed step

  // Per-step error integrand ||e(t_n)||_DG^2 and its trapezoidal integral.
  std::vector<double> dg_error_sq;
  double dg_error_sq_integral = 0.0;
  double final_l2_error = 0.0;

  std::vector<double> dg_norm_sq;
  double dg_norm_sq_integral = 0.0;

  bool aborted = false;
  std::string abort_reason;
  int picard_nonconverged_steps = 0;
  SolveStats solve_stats;

  const StateVector &final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

// Time-independent operators of the semi-discrete system plus the Crank-
// Nicolson combinations S+ = M + dt/2 (A - M_alpha), S- = M - dt/2 (A - M_alpha).
// The nonlinear reaction matrix is re-assembled into a scratch operator and
// enters the solve as a block-diagonal shift of the frozen S+.
class CrankNicolsonStepper {
public:
  CrankNicolsonStepper(const AssemblyContext &ctx, const ModelParams &params,
                       const PenaltySpec &spec, const StepperConfig &config);

  // Semi-implicit extrapolation C* = 3/2 C_n - 1/2 C_{n-1}; one linear solve.
  // At n=0 pass C_nm1 = C_0 (first-order bootstrap for a single step).
  StateVector step_semi_implicit(const StateVector &C_n, const StateVector &C_nm1,
                                 const StateVector &F_n, const StateVector &F_np1, double t_n,
                                 StepRecord &record);

  // Picard fixed-point iterations on C* = (C_k + C_n)/2.
  StateVector step_implicit(const StateVector &C_n, const StateVector &F_n,
                            const StateVector &F_np1, double t_n, StepRecord &record);

  const SparseOperator &mass() const { return M_; }
  const SparseOperator &stiffness() const { return A_; }
  const SparseOperator &linear_reaction() const { return M_alpha_; }
  const SolveStats &solve_stats() const { return solver_.stats(); }

private:
  StateVector solve_one(const StateVector &C_n, const StateVector &C_star,
                        const StateVector &F_n, const StateVector &F_np1, double t_n,
                        StepRecord &record);
  void rebuild_operators(double t);

  const AssemblyContext &ctx_;
  const ModelParams &params_;
  PenaltySpec spec_;
  StepperConfig config_;
  SparseOperator M_, A_, M_alpha_;
  SparseOperator S_plus_, S_minus_;
  SparseOperator M_tilde_;
  ShiftedSolver solver_;
  bool operators_time_dependent_ = false;
  double operators_time_ = 0.0;
};

Trajectory integrate(const StateVector &C0, const AssemblyContext &ctx,
                     const ModelParams &params, const PenaltySpec &spec,
                     const StepperConfig &config, const Probes &probes = {});

} // namespace polyfk
