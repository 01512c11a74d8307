/// @file eigen_util.hpp
/// @brief Internal bridges between the CSR/dense types and Eigen.

#pragma once

#include <Eigen/Dense>

#include "alsp/dense.hpp"
#include "alsp/sparse.hpp"

namespace alsp::detail {

inline Eigen::MatrixXd to_eigen(const SparseMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows),
                                            static_cast<Eigen::Index>(a.cols));
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      d(static_cast<Eigen::Index>(i),
        static_cast<Eigen::Index>(a.col_indices[k])) = a.values[k];
  return d;
}

inline Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
  Eigen::MatrixXd d(static_cast<Eigen::Index>(a.rows),
                    static_cast<Eigen::Index>(a.cols));
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          a.at(i, j);
  return d;
}

inline DenseMatrix from_eigen(const Eigen::MatrixXd& d) {
  DenseMatrix a(static_cast<std::size_t>(d.rows()),
                static_cast<std::size_t>(d.cols()));
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j)
      a.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = d(i, j);
  return a;
}

}  // namespace alsp::detail
