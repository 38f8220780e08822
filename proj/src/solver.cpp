#include "polyfk/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>

#include "polyfk/errors.hpp"
#include "polyfk/kernels.hpp"

namespace polyfk {

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseOperator &op) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(op.nnz());
  for (int i = 0; i < op.rows(); ++i)
    for (int k = op.row_ptr()[i]; k < op.row_ptr()[i + 1]; ++k)
      trip.emplace_back(i, op.col_index()[k], op.values()[k]);
  Eigen::SparseMatrix<double> m(op.rows(), op.rows());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

double norm2(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

} // namespace

struct ShiftedSolver::Impl {
  LinearSolverConfig config;
  SolveStats stats;

  // direct path
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool lu_valid = false;
  const SparseOperator *frozen = nullptr;

  // iterative path keeps dense LDLT factors of the element diagonal blocks
  std::vector<Eigen::LDLT<Eigen::MatrixXd>> block_prec;

  void factor_frozen() {
    lu.compute(to_eigen(*frozen));
    if (lu.info() != Eigen::Success)
      throw SolverError("sparse LU factorization of the frozen operator failed");
    lu_valid = true;
    ++stats.factorizations;
  }

  StateVector lu_solve(const StateVector &b) {
    const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), b.size());
    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
      throw SolverError("sparse LU backsolve failed");
    return StateVector(x.data(), x.data() + x.size());
  }

  // y = (frozen + scale*shift) x
  void apply(const SparseOperator &shift, double scale, const StateVector &x, StateVector &y) {
    frozen->multiply(x, y);
    if (scale != 0.0)
      shift.multiply_add(scale, x, y);
  }

  StateVector direct_solve(const SparseOperator *shift, double scale, const StateVector &b) {
    if (!lu_valid)
      factor_frozen();
    ++stats.solves;
    const double bnorm = norm2(b);
    StateVector x = lu_solve(b);
    if (!shift || scale == 0.0 || bnorm == 0.0)
      return x;

    // Defect correction for the block-diagonal shift.
    StateVector r(b.size()), ax(b.size());
    double prev_res = std::numeric_limits<double>::max();
    for (int it = 0; it < 60; ++it) {
      apply(*shift, scale, x, ax);
      for (std::size_t i = 0; i < b.size(); ++i)
        r[i] = b[i] - ax[i];
      const double res = norm2(r);
      ++stats.inner_iterations;
      if (res <= config.tol * bnorm)
        return x;
      if (res >= 0.9 * prev_res)
        break; // stalled or diverging; refactor below
      prev_res = res;
      const StateVector d = lu_solve(r);
      kernels::axpy(1.0, d, x);
    }

    // Slow path: factor the full shifted matrix.
    SparseOperator full = combine(*frozen, 1.0, *shift, scale);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> full_lu;
    full_lu.compute(to_eigen(full));
    ++stats.factorizations;
    if (full_lu.info() != Eigen::Success)
      throw SolverError("shifted system is singular");
    const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), b.size());
    Eigen::VectorXd xe = full_lu.solve(rhs);
    if (full_lu.info() != Eigen::Success)
      throw SolverError("shifted system backsolve failed");
    x.assign(xe.data(), xe.data() + xe.size());
    apply(*shift, scale, x, ax);
    for (std::size_t i = 0; i < b.size(); ++i)
      r[i] = b[i] - ax[i];
    if (norm2(r) > std::max(config.tol, 1e-10) * bnorm)
      throw SolverError("shifted system is too ill-conditioned (relative residual " +
                        std::to_string(norm2(r) / bnorm) + ")");
    return x;
  }

  void build_block_preconditioner(const SparseOperator &shift, double scale) {
    const int bs = config.block_size;
    const int n_blocks = frozen->rows() / bs;
    block_prec.resize(n_blocks);
    Eigen::MatrixXd block(bs, bs);
    for (int kb = 0; kb < n_blocks; ++kb) {
      block.setZero();
      for (int i = 0; i < bs; ++i) {
        const int row = kb * bs + i;
        for (int k = frozen->row_ptr()[row]; k < frozen->row_ptr()[row + 1]; ++k) {
          const int j = frozen->col_index()[k] - kb * bs;
          if (j >= 0 && j < bs)
            block(i, j) += frozen->values()[k];
        }
        if (scale != 0.0)
          for (int k = shift.row_ptr()[row]; k < shift.row_ptr()[row + 1]; ++k) {
            const int j = shift.col_index()[k] - kb * bs;
            if (j >= 0 && j < bs)
              block(i, j) += scale * shift.values()[k];
          }
      }
      block_prec[kb].compute(block);
    }
  }

  void apply_preconditioner(const StateVector &r, StateVector &z) {
    const int bs = config.block_size;
    const int n_blocks = frozen->rows() / bs;
    for (int kb = 0; kb < n_blocks; ++kb) {
      Eigen::Map<const Eigen::VectorXd> rb(r.data() + kb * bs, bs);
      Eigen::Map<Eigen::VectorXd> zb(z.data() + kb * bs, bs);
      zb = block_prec[kb].solve(rb);
    }
  }

  StateVector pcg_solve(const SparseOperator *shift, double scale, const StateVector &b) {
    ++stats.solves;
    const std::size_t n = b.size();
    const double bnorm = norm2(b);
    StateVector x(n, 0.0);
    if (bnorm == 0.0)
      return x;
    build_block_preconditioner(shift ? *shift : *frozen, shift ? scale : 0.0);

    StateVector r = b, z(n), p(n), ap(n);
    apply_preconditioner(r, z);
    p = z;
    double rz = kernels::dot(r, z);
    const long long max_iter = 8LL * static_cast<long long>(n) + 100;
    for (long long it = 0; it < max_iter; ++it) {
      if (shift)
        apply(*shift, scale, p, ap);
      else
        frozen->multiply(p, ap);
      const double pap = kernels::dot(p, ap);
      if (!(pap > 0.0))
        throw SolverError("PCG breakdown: operator is not positive definite");
      const double alpha = rz / pap;
      kernels::axpy(alpha, p, x);
      kernels::axpy(-alpha, ap, r);
      ++stats.inner_iterations;
      if (norm2(r) <= config.tol * bnorm)
        return x;
      apply_preconditioner(r, z);
      const double rz_new = kernels::dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i)
        p[i] = z[i] + beta * p[i];
    }
    throw SolverError("PCG failed to converge");
  }
};

ShiftedSolver::ShiftedSolver(LinearSolverConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = config;
}

ShiftedSolver::~ShiftedSolver() = default;
ShiftedSolver::ShiftedSolver(ShiftedSolver &&) noexcept = default;
ShiftedSolver &ShiftedSolver::operator=(ShiftedSolver &&) noexcept = default;

void ShiftedSolver::set_frozen(const SparseOperator &frozen) {
  impl_->frozen = &frozen;
  impl_->lu_valid = false;
  if (impl_->config.kind == LinearSolverKind::direct)
    impl_->factor_frozen();
}

StateVector ShiftedSolver::solve(const SparseOperator &shift, double scale,
                                 const StateVector &b) {
  if (!impl_->frozen)
    throw ContractViolation("ShiftedSolver: set_frozen before solve");
  if (impl_->config.kind == LinearSolverKind::direct)
    return impl_->direct_solve(&shift, scale, b);
  return impl_->pcg_solve(&shift, scale, b);
}

StateVector ShiftedSolver::solve(const StateVector &b) {
  if (!impl_->frozen)
    throw ContractViolation("ShiftedSolver: set_frozen before solve");
  if (impl_->config.kind == LinearSolverKind::direct)
    return impl_->direct_solve(nullptr, 0.0, b);
  return impl_->pcg_solve(nullptr, 0.0, b);
}

const SolveStats &ShiftedSolver::stats() const { return impl_->stats; }

} // namespace polyfk
