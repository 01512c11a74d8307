/// @file report.hpp
/// @brief Solve outcome record shared by every iterative method here.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace alsp {

enum class SolveStatus { converged, maxit, breakdown, diverged };

const char* to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::maxit;
  std::size_t outer_iters = 0;
  /// Total work count.  Real-valued because BiCGSTAB advances in half steps.
  double total_iters = 0.0;
  /// Recomputed true ||A z - l|| / ||r0|| at exit; equals the last entry of
  /// residual_history.
  double final_relres = 0.0;
  /// residual_history[0] == 1 always (the initial residual against itself).
  std::vector<double> residual_history;
  double wall_seconds = 0.0;
  /// Diagnostic extensions: populated on error-ish exits.
  std::string note;
  std::optional<std::size_t> failed_outer_index;
};

}  // namespace alsp
