#include "alsp/dense.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace alsp {

LUFactorization dense_lu(const DenseMatrix& a) {
  if (a.rows != a.cols)
    throw std::invalid_argument("dense_lu: matrix must be square");
  const std::size_t n = a.rows;

  double inf_norm = 0.0;  // max row sum
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::fabs(a.at(i, j));
    inf_norm = std::max(inf_norm, s);
  }
  const double pivot_floor = 1e-13 * inf_norm;

  LUFactorization f;
  f.n = n;
  f.lu = a.values;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;

  std::vector<double>& lu = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(lu[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = std::fabs(lu[i * n + k]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (!(best > pivot_floor))
      throw std::runtime_error(
          "dense_lu: matrix is singular to working tolerance at pivot " +
          std::to_string(k));
    if (piv != k) {
      std::swap(f.perm[piv], f.perm[k]);
      for (std::size_t j = 0; j < n; ++j)
        std::swap(lu[piv * n + j], lu[k * n + j]);
    }
    const double d = lu[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = lu[i * n + k] / d;
      lu[i * n + k] = l;
      for (std::size_t j = k + 1; j < n; ++j) lu[i * n + j] -= l * lu[k * n + j];
    }
  }
  return f;
}

std::vector<double> lu_solve(const LUFactorization& f,
                             std::span<const double> b) {
  const std::size_t n = f.n;
  if (b.size() != n) throw std::invalid_argument("lu_solve: length mismatch");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  // forward substitution with the unit lower triangle
  for (std::size_t i = 1; i < n; ++i) {
    double acc = x[i];
    for (std::size_t j = 0; j < i; ++j) acc -= f.lu[i * n + j] * x[j];
    x[i] = acc;
  }
  // back substitution with U
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= f.lu[ii * n + j] * x[j];
    x[ii] = acc / f.lu[ii * n + ii];
  }
  return x;
}

}  // namespace alsp
