/// @file spal.hpp
/// @brief Stationary augmented-block iteration, exact and inexact variants.
///
/// Each sweep solves (or approximately solves) the shifted system
///   M z_{k+1} = (f, omega*Q*y_k + g)
/// which only moves the multiplier block through the right-hand side; in
/// residual form z_{k+1} = z_k - M^{-1} r_k with r_k = A z_k - l.  The exact
/// variant factors M densely once.  The inexact variant delegates each sweep
/// to a pluggable inner solver that must reduce the shifted residual to a
/// delta fraction of ||r_k|| in the contract norm.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "alsp/report.hpp"
#include "alsp/saddle.hpp"

namespace alsp {

/// One inner solve: find dz with ||rhs - M dz|| <= target in the contract
/// norm, starting from warm_start (may be empty = zero).
struct InnerSolveRequest {
  const ShiftedOperator* op = nullptr;
  std::span<const double> rhs;
  std::span<const double> warm_start;
  double target = 0.0;  // absolute, in the contract norm
};

struct InnerSolveResult {
  std::vector<double> delta_z;
  double inner_iters = 0.0;
  /// ||rhs - M*delta_z|| recomputed in the contract norm by the callee.
  double achieved_residual = 0.0;
};

using InnerSolver = std::function<InnerSolveResult(const InnerSolveRequest&)>;

struct SpalResult {
  SolveReport report;
  std::vector<double> solution;
  /// Filled when record_iterates is set: z_0, z_1, ..., z_final.
  std::vector<std::vector<double>> iterates;
  /// Cumulative inner work after each sweep (sweep counts for the exact
  /// variant); aligns with residual_history entries 1..outer_iters.
  std::vector<double> work_at_outer;
};

struct SpalOptions {
  bool record_iterates = false;
};

/// Exact sweeps via one dense LU of M.  y0 sizes m (empty = zero); the x block
/// starts at zero.  Throws std::runtime_error when M is singular to working
/// tolerance; the message reports the admissible omega range when the leading
/// block allows one.  Divergence (relative residual above 1e12 or non-finite)
/// exits with status `diverged`.
SpalResult spal_exact(const SaddleSystem& sys, const ALConfig& cfg,
                      std::span<const double> y0 = {},
                      const SpalOptions& opts = {});

/// Inexact sweeps through `inner`.  The a-posteriori contract
/// ||r_k - M dz|| <= delta*||r_k|| is re-verified here in `contract_norm`
/// (euclidean by default); a violating sweep stops with status `breakdown`
/// and the failing outer index in the report.  z0 sizes n+m (empty = zero).
SpalResult spal_inexact(const SaddleSystem& sys, const ALConfig& cfg,
                        const InnerSolver& inner,
                        std::span<const double> z0 = {},
                        const SpalOptions& opts = {},
                        std::optional<WeightedNorm> contract_norm = {});

/// Inner solver backed by a dense LU of M (target met exactly; delta = 0
/// reproduces the exact trajectory).
InnerSolver make_lu_inner(const SaddleSystem& sys, const ALConfig& cfg);

/// Inner solver running restarted GMRES on M until the contract norm of the
/// true inner residual meets the target (checked at cycle boundaries).
InnerSolver make_gmres_inner(const SaddleSystem& sys, const ALConfig& cfg,
                             std::size_t restart = 20,
                             std::size_t max_inner = 10000,
                             std::optional<WeightedNorm> contract_norm = {});

}  // namespace alsp
