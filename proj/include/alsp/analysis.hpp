/// @file analysis.hpp
/// @brief Dense spectral diagnostics for the augmented-block splitting.
///
/// Everything here materializes M, N or B densely, so callers are expected to
/// stay within dense_cap() unknowns.  The quantities:
///
///   eta      smallest generalized eigenvalue of the symmetric-part quotient
///            x^T H x / x^T B Q^{-1} B^T x over x outside the kernel of B^T
///            (H = (G+G^T)/2).  Splitting x into range/kernel components of B
///            and eliminating the kernel part (whose H-block must be positive
///            definite) leaves a Schur complement S_H against the range
///            Gram matrix W_rr; the quotient is homogeneous, so its infimum
///            is attained at the smallest eigenvalue of (S_H, W_rr).
///   lambda1  smallest eigenvalue of 2*omega*H + B Q^{-1} B^T.
///   T        M^{-1} N, the error-propagation matrix of the stationary sweep.
///            Its spectrum is {0 (n times), 1 (m-s times), omega*mu/(1+omega*mu)}
///            where mu runs over the s quotient-pencil eigenvalues and
///            s = rank(B).
///   nm_norm  spectral norm of P^{1/2} N M^{-1} P^{-1/2} with
///            P = diag(I, beta*Q^{-1}); computed two independent ways (SVD of
///            the similarity-transformed matrix, and the reduced m-by-m
///            eigen-form) which must agree to 1e-10.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "alsp/dense.hpp"
#include "alsp/saddle.hpp"

namespace alsp {

/// Rank cutoff used everywhere a numerical rank is needed: singular values
/// above 1e-10 times the largest one count.
inline constexpr double kRankTolerance = 1e-10;

/// Quotient lower bound eta.  Throws std::runtime_error when the kernel block
/// of H is not positive definite (the message reports its smallest
/// eigenvalue).  A zero-rank B leaves the quotient domain empty and the
/// infimum is +infinity (no restriction).
double compute_eta(const SaddleSystem& sys, const QMode& q);

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;  // all n+m eigenvalues of T
  std::vector<std::complex<double>> mu_list;      // recovered pencil eigenvalues
  double spectral_radius = 0.0;                   // max |lambda|
  double pseudo_spectral_radius = 0.0;  // max |lambda| over |lambda-1| > 1e-8
  std::size_t b_rank = 0;
  /// Greedy nearest-neighbor match of the observed spectrum against the
  /// predicted multiset {0 x n, 1 x (m-s), omega*mu/(1+omega*mu)}.
  double spectrum_match_error = 0.0;
};

SpectrumReport iteration_matrix_spectrum(const SaddleSystem& sys,
                                         const ALConfig& cfg);

struct IndexCheck {
  std::size_t rank_once = 0;   // rank(I - T)
  std::size_t rank_twice = 0;  // rank((I - T)^2)
  bool index_at_most_one = false;
};

IndexCheck index_check(const SaddleSystem& sys, const ALConfig& cfg);

struct NmNormRoutes {
  double via_svd = 0.0;           // largest singular value of the weighted form
  double via_reduced_form = 0.0;  // sqrt of the m-by-m eigen-expression
};

/// Both routes; they must agree to 1e-10 (std::logic_error otherwise).
NmNormRoutes nm_norm_routes(const SaddleSystem& sys, const ALConfig& cfg);

/// Convenience: checked value from nm_norm_routes.
double nm_norm(const SaddleSystem& sys, const ALConfig& cfg);

struct SpectralReport {
  double eta = 0.0;
  double lambda1 = 0.0;
  std::vector<std::complex<double>> mu_list;
  double spectral_radius = 0.0;
  double pseudo_spectral_radius = 0.0;
  bool index_at_most_one = false;
  double nm_norm = 0.0;
  /// 1/max(0,-2*eta); +infinity when eta >= 0.
  double omega_max_exact = 0.0;
  /// min{ lambda1/omega^2, (1 - nm_norm)/2 } (not clamped below zero).
  double delta_max_inexact = 0.0;
  std::size_t b_rank = 0;
  bool exact_condition_holds = false;    // 0 < omega < omega_max_exact
  bool inexact_condition_holds = false;  // + omega^2*beta < lambda1, delta small
  /// Whether Q respects the block structure the rank-deficient bound needs
  /// (identity and uniform diagonals do; other diagonals are left unverified).
  bool q_structure_verified = false;
  double spectrum_match_error = 0.0;
};

/// Full diagnostic sweep: eta, spectrum law, index, norms and the admissible
/// parameter ranges with their verdicts.
SpectralReport convergence_conditions(const SaddleSystem& sys,
                                      const ALConfig& cfg);

struct Bb2ConditionReport {
  std::vector<std::complex<double>> eigenvalues;
  double w_min = 0.0;  // extremes of A_h^{-1} A^T A via the SPD-similar form
  double w_max = 0.0;
  std::vector<double> theta;  // per-eigenvalue contraction bound
  double lhs = 0.0;           // max |lambda|^2 / Re(lambda)
  bool condition_holds = false;        // lhs < 2*w_min
  bool strict_variant_holds = false;   // lmax(A^{-1}+A^{-T}) < 2*lmin(...)
};

/// Step-size convergence test for a square system with positive definite
/// symmetric part (std::runtime_error otherwise, reporting min eig of the
/// symmetric part).
Bb2ConditionReport bb2_condition(const DenseMatrix& a);

struct SpalbbConditionReport {
  std::vector<std::complex<double>> m_eigenvalues;
  double lhs = 0.0;  // max |lambda|^2 / Re(lambda) over eigenvalues of M
  double rhs = 0.0;  // 4 / lmax(M^{-1} + M^{-T})
  bool holds = false;
};

/// Same test applied to the shifted block matrix M; requires the leading
/// block's symmetric part positive definite.
SpalbbConditionReport spalbb_condition(const SaddleSystem& sys,
                                       const ALConfig& cfg);

struct SvdBlockReport {
  std::size_t s = 0;  // rank of B
  /// Per-iteration norms of the residual projected onto the solvable part
  /// (first n+s transformed coordinates) and the defect part (last m-s).
  std::vector<double> residual_range_component;
  std::vector<double> residual_null_component;
};

/// Projects recorded residual vectors through the SVD-adapted orthogonal
/// change of basis diag(U, V).  Throws std::runtime_error when the singular
/// values straddle the rank cutoff ambiguously.
SvdBlockReport residual_block_decomposition(
    const SaddleSystem& sys, const std::vector<std::vector<double>>& residuals);

}  // namespace alsp
