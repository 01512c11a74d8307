#include "alsp/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eigen_util.hpp"

namespace alsp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd q_inverse_dense(const QMode& q, std::size_t m) {
  MatrixXd d = MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                  static_cast<Eigen::Index>(m));
  if (!q.is_identity())
    for (std::size_t j = 0; j < m; ++j)
      d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) =
          1.0 / q.diag()[j];
  return d;
}

VectorXd q_inv_sqrt_diag(const QMode& q, std::size_t m) {
  VectorXd d = VectorXd::Ones(static_cast<Eigen::Index>(m));
  if (!q.is_identity())
    for (std::size_t j = 0; j < m; ++j)
      d(static_cast<Eigen::Index>(j)) = 1.0 / std::sqrt(q.diag()[j]);
  return d;
}

struct SvdBasis {
  MatrixXd u;       // n-by-n left singular basis (range first)
  MatrixXd v;       // m-by-m right singular basis
  VectorXd sigma;   // min(n,m) singular values, descending
  std::size_t rank = 0;
  double sigma_max = 0.0;
};

SvdBasis coupling_svd(const SaddleSystem& sys) {
  const auto n = static_cast<Eigen::Index>(sys.n());
  const auto m = static_cast<Eigen::Index>(sys.m());
  SvdBasis basis;
  if (m == 0) {
    basis.u = MatrixXd::Identity(n, n);
    basis.v = MatrixXd(0, 0);
    basis.sigma = VectorXd(0);
    return basis;
  }
  Eigen::JacobiSVD<MatrixXd> svd(detail::to_eigen(sys.b),
                                 Eigen::ComputeFullU | Eigen::ComputeFullV);
  basis.u = svd.matrixU();
  basis.v = svd.matrixV();
  basis.sigma = svd.singularValues();
  basis.sigma_max = basis.sigma.size() > 0 ? basis.sigma(0) : 0.0;
  const double cut = kRankTolerance * basis.sigma_max;
  for (Eigen::Index i = 0; i < basis.sigma.size(); ++i)
    if (basis.sigma(i) > cut) ++basis.rank;
  return basis;
}

MatrixXd symmetric_part(const MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

/// T = M^{-1} N.
MatrixXd propagation_matrix(const SaddleSystem& sys, const ALConfig& cfg) {
  MatrixXd md = detail::to_eigen(dense_M(sys, cfg));
  MatrixXd nd = detail::to_eigen(dense_N(sys, cfg));
  return md.partialPivLu().solve(nd);
}

std::size_t svd_rank(const MatrixXd& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cut = kRankTolerance * sv(0);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return rank;
}

/// Pencil eigenvalues mu of the quotient  x^T G x / x^T B Q^{-1} B^T x
/// restricted outside the kernel of B^T: eliminating the kernel block of G
/// leaves an s-by-s problem S_red a = mu W_rr a with W_rr symmetric positive
/// definite, solved through a Cholesky similarity.
std::vector<std::complex<double>> pencil_eigenvalues(const SaddleSystem& sys,
                                                     const QMode& q,
                                                     const SvdBasis& basis) {
  const auto n = static_cast<Eigen::Index>(sys.n());
  const auto s = static_cast<Eigen::Index>(basis.rank);
  std::vector<std::complex<double>> mus;
  if (s == 0) return mus;

  MatrixXd g = detail::to_eigen(sys.g);
  MatrixXd b = detail::to_eigen(sys.b);
  MatrixXd ur = basis.u.leftCols(s);
  MatrixXd un = basis.u.rightCols(n - s);

  MatrixXd grr = ur.transpose() * g * ur;
  MatrixXd s_red = grr;
  if (n - s > 0) {
    MatrixXd grn = ur.transpose() * g * un;
    MatrixXd gnr = un.transpose() * g * ur;
    MatrixXd gnn = un.transpose() * g * un;
    s_red = grr - grn * gnn.partialPivLu().solve(gnr);
  }
  MatrixXd w = b * q_inverse_dense(q, sys.m()) * b.transpose();
  MatrixXd wrr = ur.transpose() * w * ur;
  Eigen::LLT<MatrixXd> llt(symmetric_part(wrr));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "pencil reduction: range Gram matrix is not positive definite");
  MatrixXd l = llt.matrixL();
  MatrixXd c = l.triangularView<Eigen::Lower>().solve(s_red);
  c = l.triangularView<Eigen::Lower>()
          .solve(c.transpose())
          .transpose();  // L^{-1} S L^{-T}
  Eigen::EigenSolver<MatrixXd> es(c);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    mus.push_back(es.eigenvalues()(i));
  return mus;
}

/// Greedy nearest-neighbor matching of predicted against observed values.
/// Returns the largest matched distance; `taken_by` records which observed
/// index each predicted value claimed.
double greedy_match(const std::vector<std::complex<double>>& predicted,
                    const std::vector<std::complex<double>>& observed,
                    std::vector<std::size_t>* taken_by = nullptr) {
  std::vector<bool> used(observed.size(), false);
  double worst = 0.0;
  if (taken_by) taken_by->assign(predicted.size(), 0);
  for (std::size_t p = 0; p < predicted.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t o = 0; o < observed.size(); ++o) {
      if (used[o]) continue;
      const double d = std::abs(predicted[p] - observed[o]);
      if (d < best) {
        best = d;
        arg = o;
      }
    }
    used[arg] = true;
    worst = std::max(worst, best);
    if (taken_by) (*taken_by)[p] = arg;
  }
  return worst;
}

}  // namespace

double compute_eta(const SaddleSystem& sys, const QMode& q) {
  sys.validate();
  const auto n = static_cast<Eigen::Index>(sys.n());
  SvdBasis basis = coupling_svd(sys);
  const auto s = static_cast<Eigen::Index>(basis.rank);
  // Rank-zero coupling leaves nothing outside the kernel of B^T; the infimum
  // over the empty set is +infinity (no constraint on omega).
  if (s == 0) return std::numeric_limits<double>::infinity();

  MatrixXd g = detail::to_eigen(sys.g);
  MatrixXd h = symmetric_part(g);
  MatrixXd ur = basis.u.leftCols(s);
  MatrixXd un = basis.u.rightCols(n - s);

  MatrixXd hrr = ur.transpose() * h * ur;
  MatrixXd sh = hrr;
  if (n - s > 0) {
    MatrixXd hnn = un.transpose() * h * un;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(hnn);
    if (!(eig.eigenvalues()(0) > 0.0))
      throw std::runtime_error(
          "quotient bound undefined: the symmetric part restricted to the "
          "kernel of B^T is not positive definite (smallest eigenvalue " +
          std::to_string(eig.eigenvalues()(0)) + ")");
    MatrixXd hnr = un.transpose() * h * ur;
    // minimizing the numerator over the kernel component leaves the Schur
    // complement; the remaining quotient is homogeneous, so its infimum is
    // attained at the smallest generalized eigenvalue
    sh = hrr - hnr.transpose() * hnn.ldlt().solve(hnr);
  }
  MatrixXd w = detail::to_eigen(sys.b) * q_inverse_dense(q, sys.m()) *
               detail::to_eigen(sys.b).transpose();
  MatrixXd wrr = ur.transpose() * w * ur;
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(
      symmetric_part(sh), symmetric_part(wrr));
  return ges.eigenvalues()(0);
}

SpectrumReport iteration_matrix_spectrum(const SaddleSystem& sys,
                                         const ALConfig& cfg) {
  sys.validate();
  cfg.validate();
  const std::size_t n = sys.n(), m = sys.m();
  SpectrumReport rep;

  MatrixXd t = propagation_matrix(sys, cfg);
  Eigen::EigenSolver<MatrixXd> es(t);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    rep.eigenvalues.push_back(es.eigenvalues()(i));

  SvdBasis basis = coupling_svd(sys);
  rep.b_rank = basis.rank;

  // predicted multiset: 0 (n times), 1 (m-s times), omega*mu/(1+omega*mu)
  std::vector<std::complex<double>> mus =
      pencil_eigenvalues(sys, cfg.q_mode, basis);
  std::vector<std::complex<double>> predicted;
  for (const auto& mu : mus) {
    const std::complex<double> om(cfg.omega, 0.0);
    predicted.push_back(om * mu / (1.0 + om * mu));
  }
  for (std::size_t i = basis.rank; i < m; ++i) predicted.emplace_back(1.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) predicted.emplace_back(0.0, 0.0);

  std::vector<std::size_t> taken;
  rep.spectrum_match_error = greedy_match(predicted, rep.eigenvalues, &taken);

  // recover the quotient-pencil values from the observed eigenvalues they
  // matched: t = omega*mu/(1+omega*mu)  <=>  mu = t/(omega*(1-t))
  for (std::size_t p = 0; p < mus.size(); ++p) {
    const std::complex<double> tv = rep.eigenvalues[taken[p]];
    rep.mu_list.push_back(tv / (cfg.omega * (1.0 - tv)));
  }

  for (const auto& ev : rep.eigenvalues) {
    const double a = std::abs(ev);
    rep.spectral_radius = std::max(rep.spectral_radius, a);
    if (std::abs(ev - 1.0) > 1e-8)
      rep.pseudo_spectral_radius = std::max(rep.pseudo_spectral_radius, a);
  }
  return rep;
}

IndexCheck index_check(const SaddleSystem& sys, const ALConfig& cfg) {
  MatrixXd t = propagation_matrix(sys, cfg);
  MatrixXd imt = MatrixXd::Identity(t.rows(), t.cols()) - t;
  IndexCheck chk;
  chk.rank_once = svd_rank(imt);
  chk.rank_twice = svd_rank(imt * imt);
  chk.index_at_most_one = chk.rank_once == chk.rank_twice;
  return chk;
}

NmNormRoutes nm_norm_routes(const SaddleSystem& sys, const ALConfig& cfg) {
  sys.validate();
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(sys.n());
  const auto m = static_cast<Eigen::Index>(sys.m());
  NmNormRoutes out;
  if (m == 0) return out;  // empty second block: the split part vanishes

  MatrixXd md = detail::to_eigen(dense_M(sys, cfg));
  MatrixXd nd = detail::to_eigen(dense_N(sys, cfg));
  // X = N M^{-1} via M^T X^T = N^T
  MatrixXd x =
      md.transpose().partialPivLu().solve(nd.transpose()).transpose();

  // similarity by P^{1/2} = diag(I, sqrt(beta) Q^{-1/2})
  const double sb = std::sqrt(cfg.beta);
  VectorXd qis = q_inv_sqrt_diag(cfg.q_mode, sys.m());
  VectorXd row_scale = VectorXd::Ones(n + m);
  VectorXd col_scale = VectorXd::Ones(n + m);
  for (Eigen::Index j = 0; j < m; ++j) {
    row_scale(n + j) = sb * qis(j);
    col_scale(n + j) = 1.0 / (sb * qis(j));
  }
  MatrixXd tt = row_scale.asDiagonal() * x * col_scale.asDiagonal();
  Eigen::JacobiSVD<MatrixXd> svd(tt);
  out.via_svd = svd.singularValues()(0);

  // reduced m-by-m route:
  //   Phi = I - (1/omega^2) R (2 omega H + B Q^{-1} B^T - omega^2 beta I) R^T
  // with R = Q^{-1/2} B^T S_Q^{-1} and S_Q = G + (1/omega) B Q^{-1} B^T;
  // the norm is sqrt(lmax(Phi)).
  MatrixXd g = detail::to_eigen(sys.g);
  MatrixXd b = detail::to_eigen(sys.b);
  MatrixXd qinv = q_inverse_dense(cfg.q_mode, sys.m());
  MatrixXd bqbt = b * qinv * b.transpose();
  MatrixXd sq = g + (1.0 / cfg.omega) * bqbt;
  MatrixXd bqs = b * qis.asDiagonal();  // B Q^{-1/2}
  MatrixXd r = sq.transpose().partialPivLu().solve(bqs).transpose();
  MatrixXd k = 2.0 * cfg.omega * symmetric_part(g) + bqbt -
               (cfg.omega * cfg.omega * cfg.beta) *
                   MatrixXd::Identity(n, n);
  MatrixXd phi = MatrixXd::Identity(m, m) -
                 (1.0 / (cfg.omega * cfg.omega)) * r * k * r.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(symmetric_part(phi));
  const double lmax = eig.eigenvalues()(m - 1);
  out.via_reduced_form = std::sqrt(std::max(0.0, lmax));

  if (std::abs(out.via_svd - out.via_reduced_form) >
      1e-10 * std::max(1.0, out.via_svd))
    throw std::logic_error(
        "norm cross-check failed: direct " + std::to_string(out.via_svd) +
        " versus reduced " + std::to_string(out.via_reduced_form));
  return out;
}

double nm_norm(const SaddleSystem& sys, const ALConfig& cfg) {
  return nm_norm_routes(sys, cfg).via_svd;
}

SpectralReport convergence_conditions(const SaddleSystem& sys,
                                      const ALConfig& cfg) {
  sys.validate();
  cfg.validate();
  SpectralReport rep;
  rep.eta = compute_eta(sys, cfg.q_mode);

  MatrixXd g = detail::to_eigen(sys.g);
  MatrixXd b = detail::to_eigen(sys.b);
  MatrixXd lam1_arg = 2.0 * cfg.omega * symmetric_part(g) +
                      b * q_inverse_dense(cfg.q_mode, sys.m()) * b.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(lam1_arg);
  rep.lambda1 = eig.eigenvalues()(0);

  SpectrumReport spec = iteration_matrix_spectrum(sys, cfg);
  rep.mu_list = spec.mu_list;
  rep.spectral_radius = spec.spectral_radius;
  rep.pseudo_spectral_radius = spec.pseudo_spectral_radius;
  rep.b_rank = spec.b_rank;
  rep.spectrum_match_error = spec.spectrum_match_error;
  rep.index_at_most_one = index_check(sys, cfg).index_at_most_one;
  rep.nm_norm = nm_norm(sys, cfg);

  rep.omega_max_exact = rep.eta >= 0.0
                            ? std::numeric_limits<double>::infinity()
                            : 1.0 / (-2.0 * rep.eta);
  rep.delta_max_inexact =
      std::min(rep.lambda1 / (cfg.omega * cfg.omega),
               0.5 * (1.0 - rep.nm_norm));
  rep.exact_condition_holds = cfg.omega < rep.omega_max_exact;
  rep.inexact_condition_holds =
      rep.exact_condition_holds &&
      cfg.omega * cfg.omega * cfg.beta < rep.lambda1 &&
      cfg.delta <= 0.5 * (1.0 - rep.nm_norm);

  if (rep.b_rank == sys.m()) {
    rep.q_structure_verified = true;  // no defect block to worry about
  } else if (cfg.q_mode.is_identity()) {
    rep.q_structure_verified = true;
  } else {
    const auto& d = cfg.q_mode.diag();
    bool uniform = true;
    for (double v : d) uniform = uniform && v == d.front();
    rep.q_structure_verified = uniform;
  }
  return rep;
}

Bb2ConditionReport bb2_condition(const DenseMatrix& a) {
  if (a.rows != a.cols)
    throw std::invalid_argument("bb2_condition: matrix must be square");
  MatrixXd ad = detail::to_eigen(a);
  MatrixXd ah = symmetric_part(ad);
  Eigen::SelfAdjointEigenSolver<MatrixXd> heig(ah);
  if (!(heig.eigenvalues()(0) > 0.0))
    throw std::runtime_error(
        "bb2_condition: symmetric part is not positive definite (smallest "
        "eigenvalue " +
        std::to_string(heig.eigenvalues()(0)) + ")");

  Bb2ConditionReport rep;
  Eigen::EigenSolver<MatrixXd> es(ad);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    rep.eigenvalues.push_back(es.eigenvalues()(i));

  // A_h^{-1/2} (A^T A) A_h^{-1/2} is symmetric positive definite and similar
  // to A_h^{-1} A^T A, so it carries the same extreme eigenvalues.
  MatrixXd hv = heig.eigenvectors();
  VectorXd hl = heig.eigenvalues();
  MatrixXd h_inv_sqrt =
      hv * hl.array().rsqrt().matrix().asDiagonal() * hv.transpose();
  MatrixXd w_similar = h_inv_sqrt * (ad.transpose() * ad) * h_inv_sqrt;
  Eigen::SelfAdjointEigenSolver<MatrixXd> weig(symmetric_part(w_similar));
  rep.w_min = weig.eigenvalues()(0);
  rep.w_max = weig.eigenvalues()(weig.eigenvalues().size() - 1);

  rep.lhs = 0.0;
  for (const auto& ev : rep.eigenvalues) {
    const double u = ev.real();
    const double a2 = std::norm(ev);
    rep.lhs = std::max(rep.lhs, a2 / u);
    const double t1 = 1.0 - 2.0 * u / rep.w_min + a2 / (rep.w_min * rep.w_min);
    const double t2 = 1.0 - 2.0 * u / rep.w_max + a2 / (rep.w_max * rep.w_max);
    rep.theta.push_back(std::max(t1, t2));
  }
  rep.condition_holds = rep.lhs < 2.0 * rep.w_min;

  MatrixXd ainv = ad.partialPivLu().inverse();
  Eigen::SelfAdjointEigenSolver<MatrixXd> seig(ainv + ainv.transpose());
  const double smin = seig.eigenvalues()(0);
  const double smax = seig.eigenvalues()(seig.eigenvalues().size() - 1);
  rep.strict_variant_holds = smax < 2.0 * smin;
  return rep;
}

SpalbbConditionReport spalbb_condition(const SaddleSystem& sys,
                                       const ALConfig& cfg) {
  sys.validate();
  cfg.validate();
  MatrixXd g = detail::to_eigen(sys.g);
  Eigen::SelfAdjointEigenSolver<MatrixXd> heig(symmetric_part(g));
  if (!(heig.eigenvalues()(0) > 0.0))
    throw std::runtime_error(
        "spalbb_condition: the leading block's symmetric part is not "
        "positive definite (smallest eigenvalue " +
        std::to_string(heig.eigenvalues()(0)) + ")");

  SpalbbConditionReport rep;
  MatrixXd md = detail::to_eigen(dense_M(sys, cfg));
  Eigen::EigenSolver<MatrixXd> es(md);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    rep.m_eigenvalues.push_back(es.eigenvalues()(i));
    rep.lhs = std::max(rep.lhs, std::norm(es.eigenvalues()(i)) /
                                    es.eigenvalues()(i).real());
  }
  MatrixXd minv = md.partialPivLu().inverse();
  Eigen::SelfAdjointEigenSolver<MatrixXd> seig(minv + minv.transpose());
  rep.rhs = 4.0 / seig.eigenvalues()(seig.eigenvalues().size() - 1);
  rep.holds = rep.lhs < rep.rhs;
  return rep;
}

SvdBlockReport residual_block_decomposition(
    const SaddleSystem& sys,
    const std::vector<std::vector<double>>& residuals) {
  sys.validate();
  const auto n = static_cast<Eigen::Index>(sys.n());
  const auto m = static_cast<Eigen::Index>(sys.m());
  SvdBasis basis = coupling_svd(sys);
  const auto s = static_cast<Eigen::Index>(basis.rank);

  if (s > 0 && s < basis.sigma.size()) {
    const double gap = basis.sigma(s - 1) - basis.sigma(s);
    if (gap < kRankTolerance * basis.sigma_max)
      throw std::runtime_error(
          "rank decision is ambiguous: singular values straddle the cutoff "
          "with gap " +
          std::to_string(gap));
  }

  SvdBlockReport rep;
  rep.s = basis.rank;
  for (const auto& rv : residuals) {
    if (rv.size() != static_cast<std::size_t>(n + m))
      throw std::invalid_argument(
          "residual_block_decomposition: wrong residual length");
    Eigen::Map<const VectorXd> r(rv.data(), n + m);
    VectorXd rx = basis.u.transpose() * r.head(n);
    VectorXd ry = m > 0 ? (basis.v.transpose() * r.tail(m)).eval()
                        : VectorXd(0);
    double range_sq = rx.squaredNorm();
    for (Eigen::Index j = 0; j < s; ++j) range_sq += ry(j) * ry(j);
    double null_sq = 0.0;
    for (Eigen::Index j = s; j < m; ++j) null_sq += ry(j) * ry(j);
    rep.residual_range_component.push_back(std::sqrt(range_sq));
    rep.residual_null_component.push_back(std::sqrt(null_sq));
  }
  return rep;
}

}  // namespace alsp
