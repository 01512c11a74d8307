/// @file sparse.hpp
/// @brief Compressed-sparse-row matrix type and matrix-vector kernels.
///
/// Storage invariants (checked by validate()):
///   - row_offsets has rows+1 nondecreasing entries, row_offsets[0] == 0,
///     row_offsets[rows] == nnz
///   - column indices are strictly increasing within each row (no duplicates)
///   - all column indices are < cols
///
/// Summation order in the kernels is fixed (row-major, ascending column) so
/// repeated runs produce bit-identical results.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace alsp {

struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_offsets;  // size rows+1
  std::vector<std::size_t> col_indices;  // size nnz
  std::vector<double> values;            // size nnz

  std::size_t nnz() const { return values.size(); }

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Builds a CSR matrix from unordered triplets.  Duplicate (row,col) pairs are
/// rejected (std::invalid_argument); explicit zeros are kept.
SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                           std::vector<Triplet> entries);

/// n-by-n identity.
SparseMatrix sparse_identity(std::size_t n);

/// y = A*x.  Each y[i] is accumulated left to right along row i.
void spmv(const SparseMatrix& a, std::span<const double> x,
          std::span<double> y);

/// y = A^T*x via column scatter (deterministic: rows visited in order).
void spmv_transpose(const SparseMatrix& a, std::span<const double> x,
                    std::span<double> y);

/// Row-major dense copy, rows*cols values.
std::vector<double> to_dense(const SparseMatrix& a);

}  // namespace alsp
