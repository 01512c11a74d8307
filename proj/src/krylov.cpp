#include "alsp/krylov.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "alsp/saddle.hpp"

namespace alsp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::maxit: return "maxit";
    case SolveStatus::breakdown: return "breakdown";
    case SolveStatus::diverged: return "diverged";
  }
  return "unknown";
}

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

std::vector<double> true_residual(const LinearOp& op,
                                  std::span<const double> rhs,
                                  std::span<const double> z) {
  std::vector<double> az(rhs.size());
  op(z, az);
  for (std::size_t i = 0; i < az.size(); ++i) az[i] = rhs[i] - az[i];
  return az;
}

/// Shared zero-initial-residual exit: the start vector already solves the
/// system exactly.
KrylovResult already_solved(std::span<const double> z0, std::size_t n,
                            clock_type::time_point t0) {
  KrylovResult out;
  out.solution.assign(z0.begin(), z0.end());
  if (out.solution.empty()) out.solution.assign(n, 0.0);
  out.report.status = SolveStatus::converged;
  out.report.total_iters = 0.0;
  out.report.final_relres = 0.0;
  out.report.residual_history = {1.0, 0.0};
  out.report.wall_seconds = seconds_since(t0);
  return out;
}

}  // namespace

KrylovResult gmres_restarted(const LinearOp& op, std::span<const double> rhs,
                             std::span<const double> z0,
                             const KrylovConfig& cfg) {
  if (cfg.restart < 1)
    throw std::invalid_argument("gmres: restart must be >= 1");
  const auto t0 = clock_type::now();
  const std::size_t n = rhs.size();
  std::vector<double> z(n, 0.0);
  if (!z0.empty()) z.assign(z0.begin(), z0.end());

  std::vector<double> r = true_residual(op, rhs, z);
  const double beta0 = norm2(r);
  if (beta0 == 0.0) return already_solved(z, n, t0);
  const double target = cfg.tol * beta0;

  KrylovResult out;
  out.report.residual_history = {1.0};
  std::size_t total = 0;
  std::size_t cycles = 0;

  const std::size_t mdim = cfg.restart;
  std::vector<std::vector<double>> v(mdim + 1, std::vector<double>(n));
  std::vector<double> hess((mdim + 1) * mdim, 0.0);
  std::vector<double> cs(mdim), sn(mdim), gvec(mdim + 1);
  std::vector<double> w(n), y(mdim);

  auto assemble = [&](std::size_t k) {
    // back-substitute the rotated Hessenberg and add the correction
    for (std::size_t ii = k; ii-- > 0;) {
      double acc = gvec[ii];
      for (std::size_t j = ii + 1; j < k; ++j)
        acc -= hess[ii * mdim + j] * y[j];
      y[ii] = acc / hess[ii * mdim + ii];
    }
    std::vector<double> zc = z;
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) zc[i] += y[j] * v[j][i];
    return zc;
  };

  auto finish = [&](std::vector<double> zc, SolveStatus status) {
    std::vector<double> rf = true_residual(op, rhs, zc);
    const double relres = norm2(rf) / beta0;
    out.report.residual_history.push_back(relres);
    out.report.status =
        status == SolveStatus::converged && relres > cfg.tol
            ? SolveStatus::maxit
            : status;
    out.report.final_relres = relres;
    out.report.outer_iters = cycles;
    out.report.total_iters = static_cast<double>(total);
    out.report.wall_seconds = seconds_since(t0);
    out.solution = std::move(zc);
    return out;
  };

  for (;;) {
    r = true_residual(op, rhs, z);
    const double beta = norm2(r);
    if (beta <= target) {
      // start of cycle already converged (can happen after a restart)
      return finish(z, SolveStatus::converged);
    }
    ++cycles;
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(gvec.begin(), gvec.end(), 0.0);
    gvec[0] = beta;
    std::fill(hess.begin(), hess.end(), 0.0);

    for (std::size_t j = 0; j < mdim; ++j) {
      op(v[j], w);
      for (std::size_t i = 0; i <= j; ++i) {
        const double hij = dot(w, v[i]);
        hess[i * mdim + j] = hij;
        for (std::size_t t = 0; t < n; ++t) w[t] -= hij * v[i][t];
      }
      const double hnext = norm2(w);
      const bool happy = !(hnext > beta0 * 1e-300);
      if (!happy)
        for (std::size_t t = 0; t < n; ++t) v[j + 1][t] = w[t] / hnext;

      // apply the accumulated rotations, then a new one to zero the subdiagonal
      const double hsub = hnext;
      for (std::size_t i = 0; i < j; ++i) {
        const double t1 = cs[i] * hess[i * mdim + j] + sn[i] * hess[(i + 1) * mdim + j];
        const double t2 = -sn[i] * hess[i * mdim + j] + cs[i] * hess[(i + 1) * mdim + j];
        hess[i * mdim + j] = t1;
        hess[(i + 1) * mdim + j] = t2;
      }
      const double hjj = hess[j * mdim + j];
      const double denom = std::hypot(hjj, hsub);
      cs[j] = denom == 0.0 ? 1.0 : hjj / denom;
      sn[j] = denom == 0.0 ? 0.0 : hsub / denom;
      hess[j * mdim + j] = denom;
      gvec[j + 1] = -sn[j] * gvec[j];
      gvec[j] = cs[j] * gvec[j];

      const double est = std::fabs(gvec[j + 1]);
      ++total;

      const bool cycle_end = (j + 1 == mdim);
      const bool hit_cap = total >= cfg.maxit;
      if (est <= target || happy || cycle_end || hit_cap) {
        std::vector<double> zc = assemble(j + 1);
        if (est <= target || happy || hit_cap) {
          std::vector<double> rt = true_residual(op, rhs, zc);
          const double tn = norm2(rt);
          if (tn <= target) return finish(std::move(zc), SolveStatus::converged);
          if (happy) {
            out.report.note =
                "basis expansion vanished before the residual target was met";
            return finish(std::move(zc), SolveStatus::breakdown);
          }
          if (hit_cap) return finish(std::move(zc), SolveStatus::maxit);
          // estimate passed but the true residual did not: keep expanding
          out.report.residual_history.push_back(est / beta0);
          continue;
        }
        // plain cycle boundary: restart from the corrected iterate
        std::vector<double> rt = true_residual(op, rhs, zc);
        const double tn = norm2(rt);
        if (tn <= target) return finish(std::move(zc), SolveStatus::converged);
        out.report.residual_history.push_back(tn / beta0);
        z = std::move(zc);
        break;
      }
      out.report.residual_history.push_back(est / beta0);
    }
  }
}

KrylovResult bicgstab(const LinearOp& op, std::span<const double> rhs,
                      std::span<const double> z0, const KrylovConfig& cfg) {
  const auto t0 = clock_type::now();
  const std::size_t n = rhs.size();
  std::vector<double> z(n, 0.0);
  if (!z0.empty()) z.assign(z0.begin(), z0.end());

  std::vector<double> r = true_residual(op, rhs, z);
  const double beta0 = norm2(r);
  if (beta0 == 0.0) return already_solved(z, n, t0);
  const double target = cfg.tol * beta0;

  KrylovResult out;
  out.report.residual_history = {1.0};
  double total = 0.0;

  auto finish = [&](SolveStatus status) {
    std::vector<double> rf = true_residual(op, rhs, z);
    const double relres = norm2(rf) / beta0;
    out.report.residual_history.push_back(relres);
    out.report.status =
        status == SolveStatus::converged && relres > cfg.tol
            ? SolveStatus::maxit
            : status;
    out.report.final_relres = relres;
    out.report.outer_iters = static_cast<std::size_t>(total);
    out.report.total_iters = total;
    out.report.wall_seconds = seconds_since(t0);
    out.solution = z;
    return out;
  };

  const std::vector<double> rhat = r;  // fixed shadow residual
  std::vector<double> p(n, 0.0), vv(n, 0.0), s(n), t(n);
  double rho_old = 1.0, alpha = 1.0, omega_s = 1.0;
  bool first = true;

  while (total < static_cast<double>(cfg.maxit)) {
    const double rho = dot(rhat, r);
    if (std::fabs(rho) < 1e-300) {
      out.report.note = "shadow inner product (rhat, r) vanished";
      return finish(SolveStatus::breakdown);
    }
    if (first) {
      p = r;
      first = false;
    } else {
      const double betab = (rho / rho_old) * (alpha / omega_s);
      for (std::size_t i = 0; i < n; ++i)
        p[i] = r[i] + betab * (p[i] - omega_s * vv[i]);
    }
    op(p, vv);
    const double rv = dot(rhat, vv);
    if (std::fabs(rv) < 1e-300) {
      out.report.note = "shadow inner product (rhat, A p) vanished";
      return finish(SolveStatus::breakdown);
    }
    alpha = rho / rv;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * vv[i];
    for (std::size_t i = 0; i < n; ++i) z[i] += alpha * p[i];
    total += 0.5;
    out.report.total_iters = total;
    const double ns = norm2(s);
    out.report.residual_history.push_back(ns / beta0);
    if (!std::isfinite(ns) || ns > 1e12 * beta0)
      return finish(SolveStatus::diverged);
    if (ns <= target) {
      std::vector<double> rt = true_residual(op, rhs, z);
      if (norm2(rt) <= target) return finish(SolveStatus::converged);
    }

    op(s, t);
    const double tt = dot(t, t);
    if (std::fabs(tt) < 1e-300) {
      out.report.note = "stabilization direction A s vanished";
      return finish(SolveStatus::breakdown);
    }
    omega_s = dot(t, s) / tt;
    if (std::fabs(omega_s) < 1e-300) {
      out.report.note = "stabilization step collapsed to zero";
      return finish(SolveStatus::breakdown);
    }
    for (std::size_t i = 0; i < n; ++i) z[i] += omega_s * s[i];
    for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega_s * t[i];
    total += 0.5;
    out.report.total_iters = total;
    const double nr = norm2(r);
    out.report.residual_history.push_back(nr / beta0);
    if (!std::isfinite(nr) || nr > 1e12 * beta0)
      return finish(SolveStatus::diverged);
    if (nr <= target) {
      std::vector<double> rt = true_residual(op, rhs, z);
      if (norm2(rt) <= target) return finish(SolveStatus::converged);
    }
    rho_old = rho;
  }
  return finish(SolveStatus::maxit);
}

}  // namespace alsp
