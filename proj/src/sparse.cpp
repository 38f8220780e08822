#include "polyfk/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "polyfk/errors.hpp"
#include "polyfk/kernels.hpp"

namespace polyfk {

SparseOperator SparseOperator::from_pattern(std::vector<std::vector<int>> rows,
                                            bool symmetric_hint) {
  SparseOperator op;
  op.n_ = static_cast<int>(rows.size());
  op.symmetric_hint_ = symmetric_hint;
  op.row_ptr_.resize(op.n_ + 1, 0);
  for (int i = 0; i < op.n_; ++i) {
    if (!std::is_sorted(rows[i].begin(), rows[i].end()) ||
        std::adjacent_find(rows[i].begin(), rows[i].end()) != rows[i].end())
      throw ContractViolation("SparseOperator pattern rows must be sorted and unique");
    op.row_ptr_[i + 1] = op.row_ptr_[i] + static_cast<int>(rows[i].size());
  }
  op.cols_.reserve(op.row_ptr_[op.n_]);
  for (auto &r : rows)
    op.cols_.insert(op.cols_.end(), r.begin(), r.end());
  op.vals_.assign(op.cols_.size(), 0.0);
  return op;
}

void SparseOperator::set_zero() { std::fill(vals_.begin(), vals_.end(), 0.0); }

int SparseOperator::find(int i, int j) const {
  const auto begin = cols_.begin() + row_ptr_[i];
  const auto end = cols_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j)
    return -1;
  return static_cast<int>(it - cols_.begin());
}

void SparseOperator::add(int i, int j, double v) {
  const int k = find(i, j);
  if (k < 0)
    throw ContractViolation("SparseOperator::add outside pattern at (" + std::to_string(i) +
                            ", " + std::to_string(j) + ")");
  vals_[k] += v;
}

void SparseOperator::multiply(std::span<const double> x, std::span<double> y) const {
  kernels::csr_spmv(n_, row_ptr_.data(), cols_.data(), vals_.data(), x.data(), y.data());
}

void SparseOperator::multiply_add(double alpha, std::span<const double> x,
                                  std::span<double> y) const {
  std::vector<double> tmp(n_);
  kernels::csr_spmv(n_, row_ptr_.data(), cols_.data(), vals_.data(), x.data(), tmp.data());
  kernels::axpy(alpha, tmp, y);
}

double SparseOperator::symmetry_defect() const {
  double defect = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const int j = cols_[k];
      if (j < i)
        continue;
      const int kt = find(j, i);
      const double aji = kt < 0 ? 0.0 : vals_[kt];
      defect = std::max(defect, std::abs(vals_[k] - aji));
    }
  return defect;
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  for (double v : vals_)
    m = std::max(m, std::abs(v));
  return m;
}

void SparseOperator::dump_coordinate(std::ostream &out) const {
  out.precision(17);
  for (int i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      out << i << " " << cols_[k] << " " << vals_[k] << "\n";
}

SparseOperator combine(const SparseOperator &A, double ca, const SparseOperator &B, double cb) {
  if (A.rows() != B.rows())
    throw ContractViolation("combine: dimension mismatch");
  const int n = A.rows();
  std::vector<std::vector<int>> pattern(n);
  for (int i = 0; i < n; ++i) {
    auto &row = pattern[i];
    row.insert(row.end(), A.col_index().begin() + A.row_ptr()[i],
               A.col_index().begin() + A.row_ptr()[i + 1]);
    row.insert(row.end(), B.col_index().begin() + B.row_ptr()[i],
               B.col_index().begin() + B.row_ptr()[i + 1]);
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  SparseOperator out =
      SparseOperator::from_pattern(std::move(pattern), A.symmetric_hint() && B.symmetric_hint());
  for (int i = 0; i < n; ++i) {
    for (int k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k)
      out.add(i, A.col_index()[k], ca * A.values()[k]);
    for (int k = B.row_ptr()[i]; k < B.row_ptr()[i + 1]; ++k)
      out.add(i, B.col_index()[k], cb * B.values()[k]);
  }
  return out;
}

} // namespace polyfk
