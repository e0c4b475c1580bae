#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace corenet {

using Vector = std::vector<double>;

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  std::size_t nnz() const;
  DenseMatrix transposed() const;

  static DenseMatrix identity(std::size_t n);

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct SparseEntry {
  std::size_t col = 0;
  double value = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// One compressed row: column indices strictly increasing, no stored zeros.
using SparseRow = std::vector<SparseEntry>;

// Drops zeros, sorts by column and merges duplicate columns by summation.
SparseRow canonicalize(SparseRow row);

// Compressed sparse row storage. Column indices are strictly increasing within
// a row and no stored value is exactly zero.
class SparseRowMatrix {
 public:
  SparseRowMatrix() = default;
  SparseRowMatrix(std::size_t rows, std::size_t cols);
  // Rows must already be canonical; validated.
  SparseRowMatrix(std::size_t cols, const std::vector<SparseRow>& rows);

  static SparseRowMatrix from_dense(const DenseMatrix& m);

  std::size_t rows() const noexcept { return row_ptr_.size() - 1; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_cols(std::size_t i) const {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  SparseRow row(std::size_t i) const;

  DenseMatrix to_dense() const;

  friend bool operator==(const SparseRowMatrix&, const SparseRowMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

Vector matvec(const DenseMatrix& m, std::span<const double> v);
Vector matvec(const SparseRowMatrix& m, std::span<const double> v);

// Sparse row times dense vector.
double dot(const SparseRow& row, std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

Vector relu(std::span<const double> v);

struct MatrixNorms {
  double l1 = 0.0;
  double frobenius = 0.0;
};

MatrixNorms norms(const DenseMatrix& m);

// Rank-r factors: m ~= sum_i sigma_i u_i v_i^T.
struct SvdFactors {
  std::vector<double> singular_values;  // non-increasing
  std::vector<Vector> left;             // u_i, length rows
  std::vector<Vector> right;            // v_i, length cols

  std::size_t rank() const noexcept { return singular_values.size(); }
  DenseMatrix reconstruct() const;
};

struct JacobiOptions {
  double tolerance = 1e-10;
  int max_sweeps = 100;
};

// Symmetric eigendecomposition by cyclic Jacobi. Eigenvalues are returned in
// non-increasing order with eigenvectors as the matching columns.
struct SymmetricEigen {
  std::vector<double> values;
  DenseMatrix vectors;
};

SymmetricEigen jacobi_eigen(const DenseMatrix& symmetric, const JacobiOptions& options = {});

// Truncated SVD through an eigensolve of the smaller Gram matrix.
SvdFactors truncated_svd(const DenseMatrix& m, std::size_t rank,
                         const JacobiOptions& options = {});

}  // namespace corenet
