#include "alsp/spal.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "alsp/analysis.hpp"
#include "alsp/krylov.hpp"

namespace alsp {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::vector<double> full_rhs(const SaddleSystem& sys) {
  std::vector<double> l(sys.size());
  std::copy(sys.f.begin(), sys.f.end(), l.begin());
  std::copy(sys.rhs_g.begin(), sys.rhs_g.end(), l.begin() + sys.n());
  return l;
}

std::vector<double> residual(const SaddleSystem& sys,
                             std::span<const double> z,
                             std::span<const double> l) {
  std::vector<double> r(l.size());
  apply_A(sys, z, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= l[i];
  return r;
}

/// Right-hand side of one sweep: (f, omega*Q*y_k + g).
void sweep_rhs(const SaddleSystem& sys, const ALConfig& cfg,
               std::span<const double> y, std::vector<double>& out) {
  const std::size_t n = sys.n(), m = sys.m();
  std::copy(sys.f.begin(), sys.f.end(), out.begin());
  cfg.q_mode.apply(y, std::span<double>(out.data() + n, m));
  for (std::size_t j = 0; j < m; ++j)
    out[n + j] = cfg.omega * out[n + j] + sys.rhs_g[j];
}

LUFactorization factor_m_or_explain(const SaddleSystem& sys,
                                    const ALConfig& cfg) {
  try {
    return dense_lu(dense_M(sys, cfg));
  } catch (const std::runtime_error& err) {
    std::string msg = std::string("shifted block matrix is singular for "
                                  "omega=") +
                      std::to_string(cfg.omega) + " (" + err.what() + ")";
    try {
      const double eta = compute_eta(sys, cfg.q_mode);
      if (eta >= 0.0)
        msg += "; the quotient bound admits any omega > 0";
      else
        msg += "; the quotient bound admits 0 < omega < " +
               std::to_string(1.0 / -eta);
    } catch (const std::exception&) {
      // leave the base message when the quotient bound itself is undefined
    }
    throw std::runtime_error(msg);
  }
}

constexpr double kDivergenceFactor = 1e12;

}  // namespace

SpalResult spal_exact(const SaddleSystem& sys, const ALConfig& cfg,
                      std::span<const double> y0, const SpalOptions& opts) {
  sys.validate();
  cfg.validate();
  const auto t0 = clock_type::now();
  const std::size_t n = sys.n(), m = sys.m();
  if (!y0.empty() && y0.size() != m)
    throw std::invalid_argument("spal_exact: y0 must have length m");

  LUFactorization lu = factor_m_or_explain(sys, cfg);

  std::vector<double> z(n + m, 0.0);
  if (!y0.empty()) std::copy(y0.begin(), y0.end(), z.begin() + n);
  const std::vector<double> l = full_rhs(sys);

  SpalResult out;
  if (opts.record_iterates) out.iterates.push_back(z);

  std::vector<double> r = residual(sys, z, l);
  const double beta0 = norm2(r);
  out.report.residual_history = {1.0};
  if (beta0 == 0.0) {
    out.report.status = SolveStatus::converged;
    out.report.final_relres = 0.0;
    out.report.residual_history.push_back(0.0);
    out.report.wall_seconds = seconds_since(t0);
    out.solution = std::move(z);
    return out;
  }

  std::vector<double> rhs_k(n + m);
  std::size_t k = 0;
  double relres = 1.0;
  SolveStatus status = SolveStatus::maxit;
  while (true) {
    if (relres <= cfg.tol) {
      status = SolveStatus::converged;
      break;
    }
    if (!std::isfinite(relres) || relres > kDivergenceFactor) {
      status = SolveStatus::diverged;
      break;
    }
    if (k >= cfg.maxit) break;
    sweep_rhs(sys, cfg, std::span<const double>(z.data() + n, m), rhs_k);
    z = lu_solve(lu, rhs_k);
    ++k;
    if (opts.record_iterates) out.iterates.push_back(z);
    r = residual(sys, z, l);
    relres = norm2(r) / beta0;
    out.report.residual_history.push_back(relres);
    out.work_at_outer.push_back(static_cast<double>(k));
  }

  out.report.status = status;
  out.report.outer_iters = k;
  out.report.total_iters = static_cast<double>(k);
  out.report.final_relres = relres;
  out.report.wall_seconds = seconds_since(t0);
  out.solution = std::move(z);
  return out;
}

SpalResult spal_inexact(const SaddleSystem& sys, const ALConfig& cfg,
                        const InnerSolver& inner, std::span<const double> z0,
                        const SpalOptions& opts,
                        std::optional<WeightedNorm> contract_norm) {
  sys.validate();
  cfg.validate();
  const auto t0 = clock_type::now();
  const std::size_t n = sys.n(), m = sys.m();
  if (!z0.empty() && z0.size() != n + m)
    throw std::invalid_argument("spal_inexact: z0 must have length n+m");
  const WeightedNorm cnorm =
      contract_norm ? *contract_norm : WeightedNorm::euclidean();

  const ShiftedOperator m_op(sys, cfg.omega, cfg.q_mode);
  std::vector<double> z(n + m, 0.0);
  if (!z0.empty()) z.assign(z0.begin(), z0.end());
  const std::vector<double> l = full_rhs(sys);

  SpalResult out;
  if (opts.record_iterates) out.iterates.push_back(z);

  std::vector<double> r = residual(sys, z, l);
  const double beta0 = norm2(r);
  out.report.residual_history = {1.0};
  if (beta0 == 0.0) {
    out.report.status = SolveStatus::converged;
    out.report.final_relres = 0.0;
    out.report.residual_history.push_back(0.0);
    out.report.wall_seconds = seconds_since(t0);
    out.solution = std::move(z);
    return out;
  }

  std::size_t k = 0;
  double total_inner = 0.0;
  double relres = 1.0;
  SolveStatus status = SolveStatus::maxit;
  double delta_k = cfg.delta;
  std::vector<double> mdz(n + m);
  while (true) {
    if (relres <= cfg.tol) {
      status = SolveStatus::converged;
      break;
    }
    if (!std::isfinite(relres) || relres > kDivergenceFactor) {
      status = SolveStatus::diverged;
      break;
    }
    if (k >= cfg.maxit) break;

    InnerSolveRequest req;
    req.op = &m_op;
    req.rhs = r;
    req.target = delta_k * cnorm(r);
    InnerSolveResult ires = inner(req);
    if (ires.delta_z.size() != n + m)
      throw std::runtime_error("spal_inexact: inner solver returned a "
                               "correction of the wrong length");
    total_inner += ires.inner_iters;

    // Re-verify the contract a posteriori; a roundoff allowance keeps exact
    // inner solves (delta = 0) admissible.
    m_op.apply(ires.delta_z, mdz);
    for (std::size_t i = 0; i < mdz.size(); ++i) mdz[i] = r[i] - mdz[i];
    const double achieved = cnorm(mdz);
    if (achieved > req.target + 1e-10 * cnorm(r)) {
      status = SolveStatus::breakdown;
      out.report.note =
          "inner solve missed its tolerance at outer sweep " +
          std::to_string(k) + ": achieved " + std::to_string(achieved) +
          " versus target " + std::to_string(req.target);
      out.report.failed_outer_index = k;
      break;
    }

    for (std::size_t i = 0; i < z.size(); ++i) z[i] -= ires.delta_z[i];
    ++k;
    if (cfg.delta_decay) delta_k *= 0.9;
    if (opts.record_iterates) out.iterates.push_back(z);
    r = residual(sys, z, l);
    relres = norm2(r) / beta0;
    out.report.residual_history.push_back(relres);
    out.work_at_outer.push_back(total_inner);
  }

  out.report.status = status;
  out.report.outer_iters = k;
  out.report.total_iters = total_inner;
  out.report.final_relres = relres;
  out.report.wall_seconds = seconds_since(t0);
  out.solution = std::move(z);
  return out;
}

InnerSolver make_lu_inner(const SaddleSystem& sys, const ALConfig& cfg) {
  auto lu = std::make_shared<LUFactorization>(factor_m_or_explain(sys, cfg));
  const std::size_t size = sys.size();
  return [lu, size](const InnerSolveRequest& req) {
    InnerSolveResult res;
    res.delta_z = lu_solve(*lu, req.rhs);
    res.inner_iters = 1.0;
    std::vector<double> check(size);
    req.op->apply(res.delta_z, check);
    for (std::size_t i = 0; i < size; ++i) check[i] = req.rhs[i] - check[i];
    res.achieved_residual = norm2(check);
    return res;
  };
}

InnerSolver make_gmres_inner(const SaddleSystem& /*sys*/, const ALConfig& cfg,
                             std::size_t restart, std::size_t max_inner,
                             std::optional<WeightedNorm> contract_norm) {
  const WeightedNorm cnorm =
      contract_norm ? *contract_norm : WeightedNorm::euclidean();
  // Worst-case ratio of the contract norm to the euclidean norm; steering the
  // euclidean solver below target/c_hi guarantees the contract.
  double c_hi = 1.0;
  if (!cfg.q_mode.is_identity()) {
    double max_inv = 0.0;
    for (double d : cfg.q_mode.diag()) max_inv = std::max(max_inv, 1.0 / d);
    c_hi = std::sqrt(std::max(1.0, cfg.beta * max_inv));
  } else {
    c_hi = std::sqrt(std::max(1.0, cfg.beta));
  }
  return [restart, max_inner, cnorm, c_hi](const InnerSolveRequest& req) {
    LinearOp op = [&req](std::span<const double> in, std::span<double> o) {
      req.op->apply(in, o);
    };
    KrylovConfig kcfg;
    kcfg.restart = restart;
    kcfg.maxit = max_inner;
    const double rnorm2 = norm2(req.rhs);
    kcfg.tol = rnorm2 > 0.0 ? (req.target / c_hi) / rnorm2 : 0.0;
    if (kcfg.tol <= 0.0) kcfg.tol = 1e-300;  // exact-target request
    KrylovResult kres =
        gmres_restarted(op, req.rhs, req.warm_start, kcfg);
    InnerSolveResult res;
    res.delta_z = std::move(kres.solution);
    res.inner_iters = kres.report.total_iters;
    std::vector<double> check(req.rhs.size());
    req.op->apply(res.delta_z, check);
    for (std::size_t i = 0; i < check.size(); ++i)
      check[i] = req.rhs[i] - check[i];
    res.achieved_residual = cnorm(check);
    return res;
  };
}

}  // namespace alsp
