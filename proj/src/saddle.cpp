#include "alsp/saddle.hpp"

#include <cmath>
#include <stdexcept>

namespace alsp {

QMode QMode::diagonal(std::vector<double> d) {
  for (double v : d)
    if (!(v > 0.0))
      throw std::invalid_argument("QMode: diagonal entries must be positive");
  QMode q;
  q.diag_ = std::move(d);
  return q;
}

void QMode::apply(std::span<const double> y, std::span<double> out) const {
  if (diag_.empty()) {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i];
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = diag_[i] * y[i];
  }
}

void QMode::apply_inverse(std::span<const double> y,
                          std::span<double> out) const {
  if (diag_.empty()) {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i];
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] / diag_[i];
  }
}

void QMode::apply_inverse_sqrt(std::span<const double> y,
                               std::span<double> out) const {
  if (diag_.empty()) {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i];
  } else {
    for (std::size_t i = 0; i < y.size(); ++i)
      out[i] = y[i] / std::sqrt(diag_[i]);
  }
}

double QMode::quadratic(std::span<const double> y) const {
  double acc = 0.0;
  if (diag_.empty()) {
    for (double v : y) acc += v * v;
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) acc += diag_[i] * y[i] * y[i];
  }
  return acc;
}

double QMode::inverse_quadratic(std::span<const double> y) const {
  double acc = 0.0;
  if (diag_.empty()) {
    for (double v : y) acc += v * v;
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) acc += y[i] * y[i] / diag_[i];
  }
  return acc;
}

void SaddleSystem::validate() const {
  g.validate();
  b.validate();
  if (g.rows != g.cols)
    throw std::invalid_argument("saddle: leading block must be square");
  if (b.rows != g.rows)
    throw std::invalid_argument("saddle: coupling block row count mismatch");
  if (b.cols > b.rows)
    throw std::invalid_argument("saddle: coupling block needs rows >= cols");
  if (f.size() != n())
    throw std::invalid_argument("saddle: f must have length n");
  if (rhs_g.size() != m())
    throw std::invalid_argument("saddle: g must have length m");
}

void ALConfig::validate() const {
  if (!(omega > 0.0)) throw std::invalid_argument("config: omega must be > 0");
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("config: delta must lie in [0,1)");
  if (!(beta > 0.0)) throw std::invalid_argument("config: beta must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("config: tol must be > 0");
  if (maxit == 0) throw std::invalid_argument("config: maxit must be >= 1");
}

void apply_A(const SaddleSystem& s, std::span<const double> z,
             std::span<double> out) {
  const std::size_t n = s.n(), m = s.m();
  auto x = z.first(n);
  auto y = z.subspan(n, m);
  std::vector<double> tmp(n);
  spmv(s.g, x, out.first(n));
  spmv(s.b, y, std::span<double>(tmp));
  for (std::size_t i = 0; i < n; ++i) out[i] += tmp[i];
  std::vector<double> bt(m);
  spmv_transpose(s.b, x, std::span<double>(bt));
  for (std::size_t j = 0; j < m; ++j) out[n + j] = -bt[j];
}

ShiftedOperator::ShiftedOperator(const SaddleSystem& s, double omega, QMode q)
    : sys_(&s), omega_(omega), q_(std::move(q)) {
  if (!q_.is_identity() && q_.diag().size() != s.m())
    throw std::invalid_argument("shifted operator: Q diagonal length != m");
}

void ShiftedOperator::apply(std::span<const double> z,
                            std::span<double> out) const {
  const std::size_t n = sys_->n(), m = sys_->m();
  apply_A(*sys_, z, out);
  std::vector<double> qy(m);
  q_.apply(z.subspan(n, m), std::span<double>(qy));
  for (std::size_t j = 0; j < m; ++j) out[n + j] += omega_ * qy[j];
}

SplitOperator::SplitOperator(const SaddleSystem& s, double omega, QMode q)
    : n_(s.n()), m_(s.m()), omega_(omega), q_(std::move(q)) {
  if (!q_.is_identity() && q_.diag().size() != m_)
    throw std::invalid_argument("split operator: Q diagonal length != m");
}

void SplitOperator::apply(std::span<const double> z,
                          std::span<double> out) const {
  for (std::size_t i = 0; i < n_; ++i) out[i] = 0.0;
  q_.apply(z.subspan(n_, m_), out.subspan(n_, m_));
  for (std::size_t j = 0; j < m_; ++j) out[n_ + j] *= omega_;
}

WeightedNorm WeightedNorm::euclidean() { return WeightedNorm{}; }

WeightedNorm WeightedNorm::p_beta(double beta, QMode q, std::size_t n,
                                  std::size_t m) {
  if (!(beta > 0.0))
    throw std::invalid_argument("weighted norm: beta must be > 0");
  WeightedNorm w;
  w.kind_ = Kind::kPBeta;
  w.beta_ = beta;
  w.q_ = std::move(q);
  w.n_ = n;
  w.m_ = m;
  return w;
}

WeightedNorm WeightedNorm::q_norm(QMode q, std::size_t m) {
  WeightedNorm w;
  w.kind_ = Kind::kQ;
  w.q_ = std::move(q);
  w.m_ = m;
  return w;
}

double WeightedNorm::operator()(std::span<const double> v) const {
  switch (kind_) {
    case Kind::kEuclidean:
      return norm2(v);
    case Kind::kPBeta: {
      if (v.size() != n_ + m_)
        throw std::invalid_argument("weighted norm: length != n+m");
      double acc = 0.0;
      for (std::size_t i = 0; i < n_; ++i) acc += v[i] * v[i];
      acc += beta_ * q_.inverse_quadratic(v.subspan(n_, m_));
      return std::sqrt(acc);
    }
    case Kind::kQ:
      if (v.size() != m_)
        throw std::invalid_argument("weighted norm: length != m");
      return std::sqrt(q_.quadratic(v));
  }
  return 0.0;
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

namespace {

void scatter_block(DenseMatrix& d, const SparseMatrix& a, std::size_t r0,
                   std::size_t c0, double scale, bool transpose) {
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const std::size_t j = a.col_indices[k];
      if (transpose)
        d.at(r0 + j, c0 + i) += scale * a.values[k];
      else
        d.at(r0 + i, c0 + j) += scale * a.values[k];
    }
}

}  // namespace

DenseMatrix dense_A(const SaddleSystem& sys) {
  const std::size_t n = sys.n(), m = sys.m();
  DenseMatrix d(n + m, n + m);
  scatter_block(d, sys.g, 0, 0, 1.0, false);
  scatter_block(d, sys.b, 0, n, 1.0, false);
  scatter_block(d, sys.b, n, 0, -1.0, true);
  return d;
}

DenseMatrix dense_M(const SaddleSystem& sys, const ALConfig& cfg) {
  const std::size_t n = sys.n(), m = sys.m();
  DenseMatrix d = dense_A(sys);
  const auto& q = cfg.q_mode;
  for (std::size_t j = 0; j < m; ++j)
    d.at(n + j, n + j) += cfg.omega * (q.is_identity() ? 1.0 : q.diag()[j]);
  return d;
}

DenseMatrix dense_N(const SaddleSystem& sys, const ALConfig& cfg) {
  const std::size_t n = sys.n(), m = sys.m();
  DenseMatrix d(n + m, n + m);
  const auto& q = cfg.q_mode;
  for (std::size_t j = 0; j < m; ++j)
    d.at(n + j, n + j) = cfg.omega * (q.is_identity() ? 1.0 : q.diag()[j]);
  return d;
}

}  // namespace alsp
