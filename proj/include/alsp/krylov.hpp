/// @file krylov.hpp
/// @brief Restarted GMRES and BiCGSTAB on a generic linear operator.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "alsp/report.hpp"

namespace alsp {

/// out = Op * in; `out` and `in` never alias.
using LinearOp =
    std::function<void(std::span<const double>, std::span<double>)>;

struct KrylovConfig {
  std::size_t restart = 20;    // GMRES cycle length, >= 1
  double tol = 1e-6;           // relative residual target
  std::size_t maxit = 100000;  // iteration cap
};

struct KrylovResult {
  SolveReport report;
  std::vector<double> solution;
};

/// GMRES(restart) with modified Gram-Schmidt and Givens rotations.  The
/// history stores the rotation residual estimate per Arnoldi step and the
/// recomputed true residual at cycle boundaries; apparent convergence is
/// accepted only after the true residual confirms it, otherwise the cycle
/// continues.  Happy breakdown yields `converged` when the true residual
/// passes and `breakdown` otherwise.
KrylovResult gmres_restarted(const LinearOp& op, std::span<const double> rhs,
                             std::span<const double> z0,
                             const KrylovConfig& cfg);

/// BiCGSTAB; total_iters advances by 0.5 after each half step.  Breakdown is
/// declared when |rho| or |omega_s| underflows 1e-300.  The final residual is
/// always recomputed from the returned iterate.
KrylovResult bicgstab(const LinearOp& op, std::span<const double> rhs,
                      std::span<const double> z0, const KrylovConfig& cfg);

}  // namespace alsp
