#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace polyfk {

using StateVector = std::vector<double>;

// Symmetric-by-construction sparse operator in compressed row storage.
// The pattern is fixed at construction; assembly scatters into existing
// slots only, so the sparsity never couples elements that do not share
// a face.
class SparseOperator {
public:
  SparseOperator() = default;

  // rows[i] must be the sorted column list of row i (duplicates not allowed).
  static SparseOperator from_pattern(std::vector<std::vector<int>> rows, bool symmetric_hint);

  int rows() const { return n_; }
  std::size_t nnz() const { return cols_.size(); }
  bool symmetric_hint() const { return symmetric_hint_; }

  const std::vector<int> &row_ptr() const { return row_ptr_; }
  const std::vector<int> &col_index() const { return cols_; }
  const std::vector<double> &values() const { return vals_; }
  std::vector<double> &values() { return vals_; }

  void set_zero();

  // Scatter-add; throws ContractViolation if (i,j) is outside the pattern.
  void add(int i, int j, double v);

  // Index of entry (i,j) in the value array, or -1.
  int find(int i, int j) const;

  void multiply(std::span<const double> x, std::span<double> y) const; // y = A x
  void multiply_add(double alpha, std::span<const double> x, std::span<double> y) const; // y += alpha A x

  // max_{ij} |A_ij - A_ji|; exploits that the audit only needs stored entries.
  double symmetry_defect() const;
  double max_abs() const;

  // Coordinate text dump `i j value` (0-based), one entry per line.
  void dump_coordinate(std::ostream &out) const;

private:
  int n_ = 0;
  bool symmetric_hint_ = false;
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
  std::vector<double> vals_;
};

// ca*A + cb*B with pattern union (row-merge).
SparseOperator combine(const SparseOperator &A, double ca, const SparseOperator &B, double cb);

} // namespace polyfk
