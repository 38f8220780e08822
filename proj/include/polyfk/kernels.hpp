#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace polyfk::kernels {

// Data-parallel inner loops of assembly and the iterative solvers. A scalar
// reference implementation always exists; on x86-64 an AVX2+FMA variant is
// selected at runtime when the CPU supports it. Selection can be pinned via
// POLYFK_KERNEL=scalar|avx2|auto (useful for cross-machine reproducibility,
// since SIMD reductions reorder sums).
enum class Impl { scalar, avx2 };

Impl active();
std::string impl_name(Impl impl);
bool cpu_supports(Impl impl);

// Test/benchmark hook; throws if the CPU cannot run `impl`.
void force(Impl impl);

double dot(std::span<const double> x, std::span<const double> y);

// y += a*x
void axpy(double a, std::span<const double> x, std::span<double> y);

void scal(double a, std::span<double> y);

// Row-major A(m x n) += alpha * u v^T; the workhorse of local quadrature
// accumulation (mass, reaction, stiffness and face blocks).
void rank1_update(double *A, int m, int n, double alpha, const double *u, const double *v);

// y = A x for CSR storage.
void csr_spmv(int n_rows, const int *row_ptr, const int *cols, const double *vals,
              const double *x, double *y);

namespace detail {
double dot_scalar(std::span<const double>, std::span<const double>);
void axpy_scalar(double, std::span<const double>, std::span<double>);
void scal_scalar(double, std::span<double>);
void rank1_scalar(double *, int, int, double, const double *, const double *);
void spmv_scalar(int, const int *, const int *, const double *, const double *, double *);
#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(std::span<const double>, std::span<const double>);
void axpy_avx2(double, std::span<const double>, std::span<double>);
void scal_avx2(double, std::span<double>);
void rank1_avx2(double *, int, int, double, const double *, const double *);
void spmv_avx2(int, const int *, const int *, const double *, const double *, double *);
#endif
} // namespace detail

} // namespace polyfk::kernels
