#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace gravomg {

using Index = std::ptrdiff_t;

/// Entries with magnitude below this are not stored.
inline constexpr double kDropTolerance = 1e-14;

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse row matrix.
///
/// Invariants after construction: row offsets are nondecreasing and end at
/// nnz, column indices are strictly increasing within a row, and no stored
/// value has magnitude below kDropTolerance. Instances are immutable.
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols);

  /// Takes ownership of raw CSR arrays and validates them. Unsorted rows are
  /// rejected rather than repaired.
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
               std::vector<Index> col_indices, std::vector<double> values);

  /// Duplicate coordinates are summed.
  static SparseMatrix from_triplets(Index rows, Index cols, std::span<const Triplet> triplets);
  static SparseMatrix identity(Index n);
  static SparseMatrix diagonal(std::span<const double> d);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  std::span<const Index> row_offsets() const { return row_offsets_; }
  std::span<const Index> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  std::span<const Index> row_cols(Index i) const {
    return {col_indices_.data() + row_offsets_[i],
            static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i])};
  }
  std::span<const double> row_values(Index i) const {
    return {values_.data() + row_offsets_[i],
            static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i])};
  }

  /// Stored value at (i, j) or 0.
  double coeff(Index i, Index j) const;
  std::vector<double> diagonal_values() const;

  /// max |a_ij - a_ji| <= rel_tol * max |a_ij|
  bool is_symmetric(double rel_tol = 1e-12) const;

private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<double> values_;
};

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);
/// y = A x, y must already have rows(A) entries.
void spmv_into(const SparseMatrix& a, std::span<const double> x, std::span<double> y);

SparseMatrix transpose(const SparseMatrix& a);
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
/// alpha * A + beta * B
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);
/// diag(d) * A
SparseMatrix scale_rows(const SparseMatrix& a, std::span<const double> d);

/// Galerkin product P^T A P. When A is symmetric the result is averaged with
/// its transpose so roundoff does not leave it slightly asymmetric.
SparseMatrix triple_product(const SparseMatrix& p, const SparseMatrix& a);

double frobenius_norm(const SparseMatrix& a);

/// Forward Gauss-Seidel sweeps in ascending row order, updating x in place.
/// Throws ZeroDiagonalError when |a_ii| <= kDropTolerance.
void gauss_seidel(const SparseMatrix& a, std::span<double> x, std::span<const double> b, int sweeps);

/// Dense Cholesky factorization of a (small) sparse SPD matrix. The factor is
/// computed once and reused for any number of right-hand sides.
class DenseCholesky {
public:
  DenseCholesky() = default;
  /// Throws NotPositiveDefiniteError when a pivot drops to
  /// 1e-13 * max diagonal or below.
  explicit DenseCholesky(const SparseMatrix& a);

  Index size() const { return n_; }
  std::vector<double> solve(std::span<const double> b) const;

private:
  Index n_ = 0;
  std::vector<double> lower_;  // row-major, lower triangle used
};

std::vector<double> dense_cholesky_solve(const SparseMatrix& a, std::span<const double> b);

/// Matrix Market coordinate format. Reading accepts `real` / `integer` with
/// `general` or `symmetric` storage; writing always emits `real general`.
SparseMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path);

}  // namespace gravomg
