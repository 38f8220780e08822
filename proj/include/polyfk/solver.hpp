#pragma once

#include <memory>

#include "polyfk/sparse.hpp"

namespace polyfk {

enum class LinearSolverKind { direct, iterative };

struct LinearSolverConfig {
  LinearSolverKind kind = LinearSolverKind::direct;
  double tol = 1e-12; // relative residual
  int block_size = 1; // element block size, used by the iterative preconditioner
};

struct SolveStats {
  long long factorizations = 0;
  long long solves = 0;
  long long inner_iterations = 0;
};

// Solves (frozen + shift) x = b where `frozen` changes rarely (factored once)
// and `shift` is a cheap block-diagonal update that changes every call.
//
// direct: sparse LU of the frozen part plus defect-correction sweeps for the
// shift; falls back to refactorizing the full matrix when the sweep stalls.
// iterative: block-Jacobi preconditioned conjugate gradients.
class ShiftedSolver {
public:
  ShiftedSolver(LinearSolverConfig config);
  ~ShiftedSolver();
  ShiftedSolver(ShiftedSolver &&) noexcept;
  ShiftedSolver &operator=(ShiftedSolver &&) noexcept;

  void set_frozen(const SparseOperator &frozen);

  // x solving (frozen + scale*shift) x = b to the configured relative
  // residual; throws SolverError on singular systems or stagnation.
  StateVector solve(const SparseOperator &shift, double scale, const StateVector &b);

  // Plain solve against the frozen matrix only.
  StateVector solve(const StateVector &b);

  const SolveStats &stats() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace polyfk
