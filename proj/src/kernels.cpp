#include "polyfk/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace polyfk::kernels {

namespace detail {

double dot_scalar(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] += a * x[i];
}

void scal_scalar(double a, std::span<double> y) {
  for (double &v : y)
    v *= a;
}

void rank1_scalar(double *A, int m, int n, double alpha, const double *u, const double *v) {
  for (int i = 0; i < m; ++i) {
    const double au = alpha * u[i];
    double *row = A + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j)
      row[j] += au * v[j];
  }
}

void spmv_scalar(int n_rows, const int *row_ptr, const int *cols, const double *vals,
                 const double *x, double *y) {
  for (int i = 0; i < n_rows; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      s += vals[k] * x[cols[k]];
    y[i] = s;
  }
}

} // namespace detail

namespace {

bool have_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Impl resolve() {
  const char *env = std::getenv("POLYFK_KERNEL");
  const std::string req = env ? env : "auto";
  if (req == "scalar")
    return Impl::scalar;
  if (req == "avx2") {
    if (!have_avx2())
      throw std::runtime_error("POLYFK_KERNEL=avx2 requested but CPU lacks AVX2/FMA");
    return Impl::avx2;
  }
  return have_avx2() ? Impl::avx2 : Impl::scalar;
}

std::atomic<int> g_impl{-1}; // -1: not yet resolved

} // namespace

Impl active() {
  const int v = g_impl.load(std::memory_order_relaxed);
  if (v >= 0)
    return static_cast<Impl>(v);
  const Impl r = resolve();
  g_impl.store(static_cast<int>(r), std::memory_order_relaxed);
  return r;
}

std::string impl_name(Impl impl) { return impl == Impl::avx2 ? "avx2" : "scalar"; }

bool cpu_supports(Impl impl) { return impl == Impl::scalar || have_avx2(); }

void force(Impl impl) {
  if (!cpu_supports(impl))
    throw std::runtime_error("kernel implementation not supported on this CPU");
  g_impl.store(static_cast<int>(impl), std::memory_order_relaxed);
}

double dot(std::span<const double> x, std::span<const double> y) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active() == Impl::avx2)
    return detail::dot_avx2(x, y);
#endif
  return detail::dot_scalar(x, y);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active() == Impl::avx2)
    return detail::axpy_avx2(a, x, y);
#endif
  detail::axpy_scalar(a, x, y);
}

void scal(double a, std::span<double> y) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active() == Impl::avx2)
    return detail::scal_avx2(a, y);
#endif
  detail::scal_scalar(a, y);
}

void rank1_update(double *A, int m, int n, double alpha, const double *u, const double *v) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active() == Impl::avx2)
    return detail::rank1_avx2(A, m, n, alpha, u, v);
#endif
  detail::rank1_scalar(A, m, n, alpha, u, v);
}

void csr_spmv(int n_rows, const int *row_ptr, const int *cols, const double *vals,
              const double *x, double *y) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active() == Impl::avx2)
    return detail::spmv_avx2(n_rows, row_ptr, cols, vals, x, y);
#endif
  detail::spmv_scalar(n_rows, row_ptr, cols, vals, x, y);
}

} // namespace polyfk::kernels
