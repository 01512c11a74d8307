/// @file dense.hpp
/// @brief Row-major dense matrix and an LU direct solver with partial pivoting.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace alsp {

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major, rows*cols entries

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// LU factorization with partial pivoting, P*A = L*U.  `lu` packs the unit
/// lower triangle (below the diagonal) and U (diagonal and above); `perm` maps
/// factored row i to original row perm[i].
struct LUFactorization {
  std::size_t n = 0;
  std::vector<double> lu;         // row-major n*n
  std::vector<std::size_t> perm;  // row permutation
};

/// Factors a square matrix.  A pivot column whose best candidate has magnitude
/// <= 1e-13 * max-row-sum norm of A is treated as singular; the error message
/// names the failing pivot index.
LUFactorization dense_lu(const DenseMatrix& a);

/// Solves A*x = b using a factorization from dense_lu.
std::vector<double> lu_solve(const LUFactorization& f,
                             std::span<const double> b);

}  // namespace alsp
