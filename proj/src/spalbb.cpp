#include "alsp/spalbb.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace alsp {

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

constexpr double kDivergenceFactor = 1e12;

}  // namespace

BBStepsizes bb_stepsizes(std::span<const double> s, std::span<const double> d,
                         std::span<const double> r,
                         std::span<const double> ar) {
  BBStepsizes out;
  const double ss = dot(s, s), sd = dot(s, d), dd = dot(d, d);
  const double rar = dot(r, ar), arar = dot(ar, ar);
  out.bb1 = ss / sd;
  out.bb2 = sd / dd;
  out.mg = rar / arar;
  return out;
}

InnerSolveResult bb2_run(const LinearOp& op, std::span<const double> rhs,
                         BBState& state, double target, std::size_t max_steps,
                         std::vector<double>* alpha_log,
                         std::vector<StepKind>* kind_log,
                         std::vector<double>* trace) {
  const std::size_t n = rhs.size();
  if (state.z_cur.empty()) state.z_cur.assign(n, 0.0);
  if (state.z_cur.size() != n)
    throw std::invalid_argument("bb2_run: state size mismatch");

  std::vector<double> rho(n), tmp(n), s(n);
  auto refresh_rho = [&]() {
    op(state.z_cur, rho);
    for (std::size_t i = 0; i < n; ++i) rho[i] -= rhs[i];
  };
  refresh_rho();

  InnerSolveResult res;
  std::size_t steps = 0;
  while (norm2(rho) > target && steps < max_steps) {
    double alpha = 0.0;
    StepKind kind = StepKind::mg;
    if (state.has_prev) {
      for (std::size_t i = 0; i < n; ++i)
        s[i] = state.z_cur[i] - state.z_prev[i];
      const double ss = dot(s, s);
      if (ss > 1e-300) {
        op(s, tmp);  // d = M s
        const double sd = dot(s, tmp);
        if (sd > 0.0) {
          alpha = sd / dot(tmp, tmp);
          kind = StepKind::bb2;
        }
      }
    }
    if (kind == StepKind::mg) {
      // minimal-gradient step: exact one-dimensional residual minimizer
      op(rho, tmp);
      const double denom = dot(tmp, tmp);
      alpha = denom > 0.0 ? dot(rho, tmp) / denom : 1.0;
      if (!std::isfinite(alpha) || alpha == 0.0) alpha = 1.0;
    }

    state.z_prev = state.z_cur;
    for (std::size_t i = 0; i < n; ++i) state.z_cur[i] -= alpha * rho[i];
    state.has_prev = true;
    state.alpha = alpha;
    state.last_kind = kind;
    refresh_rho();
    ++steps;
    if (alpha_log) alpha_log->push_back(alpha);
    if (kind_log) kind_log->push_back(kind);
    if (trace) trace->push_back(norm2(rho));
  }

  res.delta_z = state.z_cur;  // final iterate approximately solves op*z = rhs
  res.inner_iters = static_cast<double>(steps);
  res.achieved_residual = norm2(rho);
  return res;
}

SpalbbResult spalbb(const SaddleSystem& sys, const ALConfig& cfg,
                    std::span<const double> z0, std::span<const double> z_prev,
                    const SpalbbOptions& opts) {
  sys.validate();
  cfg.validate();
  const auto t0 = clock_type::now();
  const std::size_t n = sys.n(), m = sys.m();
  if (!z0.empty() && z0.size() != n + m)
    throw std::invalid_argument("spalbb: z0 must have length n+m");
  if (!z_prev.empty() && z_prev.size() != n + m)
    throw std::invalid_argument("spalbb: z_prev must have length n+m");

  const ShiftedOperator m_op(sys, cfg.omega, cfg.q_mode);
  LinearOp op = [&m_op](std::span<const double> in, std::span<double> out) {
    m_op.apply(in, out);
  };

  BBState state;
  state.z_cur.assign(n + m, 0.0);
  if (!z0.empty()) state.z_cur.assign(z0.begin(), z0.end());
  if (!z_prev.empty()) {
    state.z_prev.assign(z_prev.begin(), z_prev.end());
    state.has_prev = true;
  }

  std::vector<double> l(n + m);
  std::copy(sys.f.begin(), sys.f.end(), l.begin());
  std::copy(sys.rhs_g.begin(), sys.rhs_g.end(), l.begin() + n);

  SpalbbResult out;
  if (opts.record_iterates) out.iterates.push_back(state.z_cur);

  std::vector<double> r(n + m);
  auto refresh_outer = [&]() {
    apply_A(sys, state.z_cur, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= l[i];
  };
  refresh_outer();
  const double beta0 = norm2(r);
  out.report.residual_history = {1.0};
  out.work_at_outer = {0.0};
  if (beta0 == 0.0) {
    out.report.status = SolveStatus::converged;
    out.report.final_relres = 0.0;
    out.report.residual_history.push_back(0.0);
    out.work_at_outer.push_back(0.0);
    out.report.wall_seconds = seconds_since(t0);
    out.solution = state.z_cur;
    return out;
  }

  std::vector<double> sweep_l(n + m);
  std::size_t outer = 0;
  double total = 0.0;
  double relres = 1.0;
  double delta_k = cfg.delta;
  SolveStatus status = SolveStatus::maxit;
  std::vector<double> raw_trace;

  while (true) {
    if (relres <= cfg.tol) {
      status = SolveStatus::converged;
      break;
    }
    if (!std::isfinite(relres) || relres > kDivergenceFactor) {
      status = SolveStatus::diverged;
      break;
    }
    if (total >= static_cast<double>(cfg.maxit)) break;

    // sweep right-hand side (f, omega*Q*y_k + g); the outer residual is
    // frozen into the inner tolerance for this whole sweep
    std::copy(sys.f.begin(), sys.f.end(), sweep_l.begin());
    cfg.q_mode.apply(std::span<const double>(state.z_cur.data() + n, m),
                     std::span<double>(sweep_l.data() + n, m));
    for (std::size_t j = 0; j < m; ++j)
      sweep_l[n + j] = cfg.omega * sweep_l[n + j] + sys.rhs_g[j];

    const double target = delta_k * norm2(r);
    const auto budget = static_cast<std::size_t>(
        std::max(0.0, static_cast<double>(cfg.maxit) - total));
    raw_trace.clear();
    InnerSolveResult ires =
        bb2_run(op, sweep_l, state, target, budget, &out.alpha_log,
                &out.kind_log, opts.record_inner_trace ? &raw_trace : nullptr);
    total += ires.inner_iters;
    ++outer;
    if (cfg.delta_decay) delta_k *= 0.9;
    if (opts.record_inner_trace)
      for (double v : raw_trace) out.inner_trace.push_back(v / beta0);
    if (opts.record_iterates) out.iterates.push_back(state.z_cur);

    refresh_outer();
    relres = norm2(r) / beta0;
    out.report.residual_history.push_back(relres);
    out.work_at_outer.push_back(total);

    if (ires.achieved_residual > target &&
        total >= static_cast<double>(cfg.maxit))
      break;  // ran out of budget mid-sweep
  }

  out.report.status = status;
  out.report.outer_iters = outer;
  out.report.total_iters = total;
  out.report.final_relres = relres;
  out.report.wall_seconds = seconds_since(t0);
  out.solution = state.z_cur;
  return out;
}

Bb1DivergenceReport bb1_divergence_demo(std::array<double, 2> z0,
                                        std::size_t steps) {
  Bb1DivergenceReport rep;
  rep.iterates.push_back(z0);
  std::array<double, 2> z = z0;
  for (std::size_t k = 0; k < steps; ++k) {
    // alpha is exactly 1 for this matrix (its symmetric part is the
    // identity), so the update z - (A z) collapses to (x,y) -> (-2y, 2x).
    const std::array<double, 2> next{-2.0 * z[1], 2.0 * z[0]};
    const double n_old = std::hypot(z[0], z[1]);
    const double n_new = std::hypot(next[0], next[1]);
    rep.norm_ratios.push_back(n_old == 0.0 ? 0.0 : n_new / n_old);
    z = next;
    rep.iterates.push_back(z);
  }
  return rep;
}

}  // namespace alsp
