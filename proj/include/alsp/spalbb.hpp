/// @file spalbb.hpp
/// @brief Gradient-type inner sweeps with Barzilai-Borwein step sizes, the
///        combined outer/inner solver, and the classic BB1 divergence demo.
///
/// Inner iteration on M z = l_k:  rho_j = M z_j - l_k,
///   s = z_j - z_{j-1},  d = M s,  alpha = s^T d / d^T d   (second BB form),
///   z_{j+1} = z_j - alpha * rho_j.
/// The (z_prev, z_cur) pair persists across outer sweeps -- one global step
/// index -- so the first step of a later sweep reuses history.  A step with no
/// usable history (start of run, ||s|| underflow, or s^T d <= 0) falls back to
/// the minimal-gradient size  rho^T M rho / ||M rho||^2, which minimizes the
/// next residual norm exactly.

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "alsp/krylov.hpp"
#include "alsp/report.hpp"
#include "alsp/saddle.hpp"
#include "alsp/spal.hpp"

namespace alsp {

enum class StepKind { mg, bb2 };

/// Persistent state of the BB recurrence across sweeps.
struct BBState {
  std::vector<double> z_prev;
  std::vector<double> z_cur;
  bool has_prev = false;
  double alpha = 0.0;
  StepKind last_kind = StepKind::mg;
};

/// The three step-size formulas evaluated from a step s, its image d = A s,
/// and a residual r with image Ar = A r.  bb1 = s^T s / s^T d,
/// bb2 = s^T d / d^T d, mg = r^T Ar / Ar^T Ar.
struct BBStepsizes {
  double bb1 = 0.0;
  double bb2 = 0.0;
  double mg = 0.0;
};

BBStepsizes bb_stepsizes(std::span<const double> s, std::span<const double> d,
                         std::span<const double> r,
                         std::span<const double> ar);

/// Runs BB2 steps on op*z = rhs from state.z_cur until the residual 2-norm is
/// <= target or max_steps is exhausted.  Appends every step size to alpha_log
/// and every post-step ||rho|| to trace when the pointers are non-null.
InnerSolveResult bb2_run(const LinearOp& op, std::span<const double> rhs,
                         BBState& state, double target,
                         std::size_t max_steps,
                         std::vector<double>* alpha_log = nullptr,
                         std::vector<StepKind>* kind_log = nullptr,
                         std::vector<double>* trace = nullptr);

struct SpalbbOptions {
  bool record_iterates = false;
  bool record_inner_trace = false;
};

struct SpalbbResult {
  SolveReport report;  // residual_history: outer ||r_k||/||r0|| per sweep
  std::vector<double> solution;
  std::vector<std::vector<double>> iterates;     // outer iterates if recorded
  std::vector<double> alpha_log;                 // every inner step size
  std::vector<StepKind> kind_log;
  /// Cumulative inner-iteration count at each outer boundary (parallel to
  /// residual_history) for work-versus-residual plots.
  std::vector<double> work_at_outer;
  /// Per-inner-step ||rho_j|| / ||r0|| when record_inner_trace is set.
  std::vector<double> inner_trace;
};

/// Outer loop: stop on ||A z_k - l|| / ||r0|| <= tol; otherwise sweep the
/// inner BB2 iteration on M z = (f, omega*Q*y_k + g) until the inner residual
/// drops to delta * ||r_k|| (outer residual frozen at sweep start).
/// total_iters counts every inner step; outer_iters counts sweeps.  z_prev
/// seeds the BB history (empty = none: first step uses minimal gradient).
SpalbbResult spalbb(const SaddleSystem& sys, const ALConfig& cfg,
                    std::span<const double> z0 = {},
                    std::span<const double> z_prev = {},
                    const SpalbbOptions& opts = {});

/// Fixed-unit-step divergence demo on [[1,2],[-2,1]] with zero right-hand
/// side.  For this matrix the first BB form always evaluates to 1, so the map
/// is (x,y) -> (-2y, 2x): the norm doubles every step (squared factor 4).
/// A squared factor of 8 is sometimes quoted for this example; the report
/// carries both values and flags the mismatch.
struct Bb1DivergenceReport {
  std::vector<std::array<double, 2>> iterates;  // z_0 ... z_steps
  std::vector<double> norm_ratios;              // ||z_{k+1}|| / ||z_k||
  double squared_growth_per_step = 4.0;         // implied by the recurrence
  double squared_growth_quoted = 8.0;           // often-quoted value
  bool growth_quote_mismatch = true;
};

Bb1DivergenceReport bb1_divergence_demo(std::array<double, 2> z0,
                                        std::size_t steps);

}  // namespace alsp
