#include "alsp/sparse.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace alsp {

void SparseMatrix::validate() const {
  if (row_offsets.size() != rows + 1)
    throw std::invalid_argument("csr: row_offsets must have rows+1 entries");
  if (!row_offsets.empty() && row_offsets.front() != 0)
    throw std::invalid_argument("csr: row_offsets[0] must be 0");
  if (col_indices.size() != values.size())
    throw std::invalid_argument("csr: col_indices/values length mismatch");
  if (row_offsets.back() != values.size())
    throw std::invalid_argument("csr: row_offsets back must equal nnz");
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_offsets[i] > row_offsets[i + 1])
      throw std::invalid_argument("csr: row_offsets must be nondecreasing");
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (col_indices[k] >= cols)
        throw std::invalid_argument("csr: column index out of range in row " +
                                    std::to_string(i));
      if (k > row_offsets[i] && col_indices[k - 1] >= col_indices[k])
        throw std::invalid_argument(
            "csr: column indices must be strictly increasing in row " +
            std::to_string(i));
    }
  }
}

SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                           std::vector<Triplet> entries) {
  for (const Triplet& t : entries) {
    if (t.row >= rows || t.col >= cols)
      throw std::invalid_argument("from_triplets: entry out of range (" +
                                  std::to_string(t.row) + "," +
                                  std::to_string(t.col) + ")");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k].row == entries[k - 1].row &&
        entries[k].col == entries[k - 1].col)
      throw std::invalid_argument("from_triplets: duplicate entry (" +
                                  std::to_string(entries[k].row) + "," +
                                  std::to_string(entries[k].col) + ")");
  }
  SparseMatrix a;
  a.rows = rows;
  a.cols = cols;
  a.row_offsets.assign(rows + 1, 0);
  a.col_indices.reserve(entries.size());
  a.values.reserve(entries.size());
  for (const Triplet& t : entries) ++a.row_offsets[t.row + 1];
  for (std::size_t i = 0; i < rows; ++i)
    a.row_offsets[i + 1] += a.row_offsets[i];
  for (const Triplet& t : entries) {
    a.col_indices.push_back(t.col);
    a.values.push_back(t.value);
  }
  return a;
}

SparseMatrix sparse_identity(std::size_t n) {
  SparseMatrix a;
  a.rows = a.cols = n;
  a.row_offsets.resize(n + 1);
  a.col_indices.resize(n);
  a.values.assign(n, 1.0);
  for (std::size_t i = 0; i <= n; ++i) a.row_offsets[i] = i;
  for (std::size_t i = 0; i < n; ++i) a.col_indices[i] = i;
  return a;
}

void spmv(const SparseMatrix& a, std::span<const double> x,
          std::span<double> y) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    double acc = 0.0;
    for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      acc += a.values[k] * x[a.col_indices[k]];
    y[i] = acc;
  }
}

void spmv_transpose(const SparseMatrix& a, std::span<const double> x,
                    std::span<double> y) {
  std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(a.cols), 0.0);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      y[a.col_indices[k]] += a.values[k] * x[i];
}

std::vector<double> to_dense(const SparseMatrix& a) {
  std::vector<double> d(a.rows * a.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      d[i * a.cols + a.col_indices[k]] = a.values[k];
  return d;
}

}  // namespace alsp
