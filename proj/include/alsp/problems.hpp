/// @file problems.hpp
/// @brief Synthetic problem generators and directory-based import/export.
///
/// Generators:
///   stokes_mac: staggered (MAC) finite differences on the unit square with an
///     N-by-N pressure grid; n = 2N(N-1) interior face velocities, m = N^2
///     cell pressures.  The leading block is nu times the 5-point Laplacian on
///     each velocity component (symmetric positive definite), B is the
///     discrete gradient whose kernel is the constant pressure vector, so
///     rank(B) = m - 1.
///   oseen_mac: same grid; the leading block adds a centered first-order
///     convection term for a constant wind.  Centered differencing with
///     homogeneous Dirichlet data is exactly skew-symmetric, so the symmetric
///     part stays nu*Laplacian (positive definite).
///   random: dense G = shift*I + R + K with R symmetric positive
///     semidefinite, K skew-symmetric; B = U_s * diag(sigma) * V_s^T with
///     orthonormal U_s, V_s and sigma in [1,2], giving exact rank s.
///   bb1_counterexample: the 2-by-2 square system [[1,2],[-2,1]] with zero
///     right-hand side, exposed with m = 0 (no coupling block).
///
/// Right-hand sides are manufactured from a seeded reference solution z* so
/// rank-deficient systems stay consistent: f = G x* + B y*, g = -B^T x*.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "alsp/saddle.hpp"

namespace alsp {

struct StokesMacSpec {
  std::size_t grid = 4;   // pressure cells per side, >= 2
  double nu = 1.0;        // viscosity, > 0
};

struct OseenMacSpec {
  std::size_t grid = 4;
  double nu = 1.0;
  double wind_x = 1.0;
  double wind_y = 0.0;
};

struct RandomSpec {
  std::size_t n = 6;
  std::size_t m = 3;
  std::size_t rank = 3;       // <= m
  double symmetric_shift = 1.0;
};

struct Bb1Spec {};

struct ImportSpec {
  std::string path;  // problem directory
};

struct ProblemSpec {
  std::variant<StokesMacSpec, OseenMacSpec, RandomSpec, Bb1Spec, ImportSpec>
      kind = StokesMacSpec{};
  std::uint64_t seed = 1;
};

struct ProblemProperties {
  std::optional<bool> g_is_upd;       // symmetric part positive definite
  std::optional<double> h_min_eig;    // smallest eigenvalue of (G+G^T)/2
  std::optional<std::size_t> b_rank;  // from SVD when n+m is desk-sized
};

struct GeneratedProblem {
  SaddleSystem system;
  std::optional<std::vector<double>> reference_solution;  // z* = (x*, y*)
  ProblemProperties properties;
};

/// Builds the problem described by `spec`; byte-reproducible for equal specs.
GeneratedProblem generate(const ProblemSpec& spec);

/// Writes G.mtx, B.mtx, f.vec, g.vec and meta.txt into `dir` (created if
/// absent).
void save_problem(const GeneratedProblem& p, const std::string& dir);

/// Reads a directory written by save_problem.  Missing files are reported by
/// name; dimension mismatches are rejected.  Spectral properties are only
/// recomputed when n+m is within the dense threshold.
GeneratedProblem load_problem(const std::string& dir);

/// Dense-analysis size cap: 2000 unless overridden by the ALSP_DENSE_CAP
/// environment variable.
std::size_t dense_cap();

}  // namespace alsp
