/// @file saddle.hpp
/// @brief Block system  [G  B; -B^T  0] [x; y] = [f; g]  and the augmented
///        operators used by the stationary solvers.
///
/// Dimensions: G is n-by-n, B is n-by-m with n >= m.  The shifted operator is
///   M = [G  B; -B^T  omega*Q],
/// the complementary split part is
///   N = [0  0; 0  omega*Q],
/// so M - N applies the original system matrix A.  Q is restricted to the
/// identity or a positive diagonal; that keeps every Q-product trivially
/// invertible and the solvers allocation-light.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alsp/dense.hpp"
#include "alsp/sparse.hpp"

namespace alsp {

/// Identity or positive diagonal weight used for the (2,2) augmentation block.
class QMode {
 public:
  static QMode identity() { return QMode{}; }
  static QMode diagonal(std::vector<double> d);  // rejects entries <= 0

  bool is_identity() const { return diag_.empty(); }
  const std::vector<double>& diag() const { return diag_; }

  /// out = Q*y, out = Q^{-1}*y, out = Q^{-1/2}*y (sized checks in debug only).
  void apply(std::span<const double> y, std::span<double> out) const;
  void apply_inverse(std::span<const double> y, std::span<double> out) const;
  void apply_inverse_sqrt(std::span<const double> y,
                          std::span<double> out) const;

  /// y^T Q y and y^T Q^{-1} y, accumulated in index order.
  double quadratic(std::span<const double> y) const;
  double inverse_quadratic(std::span<const double> y) const;

 private:
  std::vector<double> diag_;  // empty means identity
};

struct SaddleSystem {
  SparseMatrix g;  // n-by-n leading block
  SparseMatrix b;  // n-by-m coupling block, n >= m
  std::vector<double> f;  // length n
  std::vector<double> rhs_g;  // length m (second block row right-hand side)
  std::optional<std::size_t> b_rank;  // rank of B when known
  std::string label;

  std::size_t n() const { return g.rows; }
  std::size_t m() const { return b.cols; }
  std::size_t size() const { return n() + m(); }

  /// Throws std::invalid_argument on dimension mismatches (n < m, vector
  /// lengths, non-square G).
  void validate() const;
};

/// Parameters shared by the stationary solvers.
struct ALConfig {
  double omega = 1.0;          // augmentation weight, > 0
  QMode q_mode = QMode::identity();
  double delta = 0.0;          // inner-solve tolerance fraction, in [0,1)
  double beta = 1.0;           // analysis-norm weight, > 0
  double tol = 1e-6;           // outer relative-residual stop
  std::size_t maxit = 100000;  // global iteration cap
  bool delta_decay = false;    // optional geometric decay delta_k = delta*0.9^k

  void validate() const;  // throws std::invalid_argument naming the field
};

/// out = A*z = (G x + B y, -B^T x) with z = (x, y).
void apply_A(const SaddleSystem& s, std::span<const double> z,
             std::span<double> out);

/// Applies M = [G B; -B^T omega*Q].
class ShiftedOperator {
 public:
  ShiftedOperator(const SaddleSystem& s, double omega, QMode q);
  void apply(std::span<const double> z, std::span<double> out) const;
  std::size_t size() const { return sys_->size(); }
  const SaddleSystem& system() const { return *sys_; }
  double omega() const { return omega_; }
  const QMode& q() const { return q_; }

 private:
  const SaddleSystem* sys_;
  double omega_;
  QMode q_;
};

/// Applies N = [0 0; 0 omega*Q]: z -> (0, omega*Q*y).
class SplitOperator {
 public:
  SplitOperator(const SaddleSystem& s, double omega, QMode q);
  void apply(std::span<const double> z, std::span<double> out) const;
  std::size_t size() const { return n_ + m_; }

 private:
  std::size_t n_, m_;
  double omega_;
  QMode q_;
};

/// Vector norms used for stopping tests and bound verification:
///   euclidean: plain 2-norm;
///   p_beta:    sqrt(x^T x + beta * y^T Q^{-1} y) on (n+m)-vectors;
///   q_norm:    sqrt(y^T Q y) on m-vectors.
class WeightedNorm {
 public:
  static WeightedNorm euclidean();
  static WeightedNorm p_beta(double beta, QMode q, std::size_t n,
                             std::size_t m);
  static WeightedNorm q_norm(QMode q, std::size_t m);

  double operator()(std::span<const double> v) const;

 private:
  enum class Kind { kEuclidean, kPBeta, kQ } kind_ = Kind::kEuclidean;
  double beta_ = 1.0;
  QMode q_ = QMode::identity();
  std::size_t n_ = 0, m_ = 0;
};

/// Euclidean 2-norm with fixed left-to-right accumulation.
double norm2(std::span<const double> v);

// Dense copies of the block composites, used by the direct sweep solver and
// the spectral diagnostics.
DenseMatrix dense_A(const SaddleSystem& sys);
DenseMatrix dense_M(const SaddleSystem& sys, const ALConfig& cfg);
DenseMatrix dense_N(const SaddleSystem& sys, const ALConfig& cfg);

}  // namespace alsp
