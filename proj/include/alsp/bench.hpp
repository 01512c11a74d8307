/// @file bench.hpp
/// @brief Benchmark grid runner: problems x methods x omega values.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "alsp/problems.hpp"
#include "alsp/report.hpp"

namespace alsp {

enum class MethodKind { spal_exact, spal_inexact, spalbb, gmres, bicgstab };

struct MethodSpec {
  MethodKind kind = MethodKind::spalbb;
  std::size_t restart = 20;        // gmres and gmres-type inner solves
  std::string inner = "lu";        // spal_inexact: "lu" or "gmres"
  std::string label;               // e.g. "gmres(20)"
};

struct BenchProblem {
  ProblemSpec spec;
  std::string label;
};

struct BenchConfig {
  std::vector<BenchProblem> problems;
  std::vector<MethodSpec> methods;
  std::vector<double> omega_list;
  double delta = 0.5;
  double tol = 1e-6;
  std::size_t maxit = 100000;
  std::size_t threads = 1;
};

struct ResultRow {
  std::string problem;
  std::string method;
  double omega = 0.0;
  double delta = 0.0;
  /// Empty for methods with no outer/inner split (gmres, bicgstab).
  std::optional<std::size_t> oiter;
  double titer = 0.0;
  double cpu_seconds = 0.0;
  double final_relres = 0.0;
  SolveStatus status = SolveStatus::maxit;
};

/// Parses the flat key=value format (one pair per line, '#' comments;
/// repeated `problem`, `method` and `omega` keys accumulate).  Errors carry
/// the offending line number.
BenchConfig parse_bench_config(const std::string& text);

/// Parses one inline problem description, e.g.
/// "stokes-mac,grid=4,nu=1,seed=1" or "dir:/path/to/problem".
BenchProblem parse_problem_spec(const std::string& text);

/// Parses one method description, e.g. "gmres,restart=20" or
/// "spal-inexact,inner=gmres,restart=30".
MethodSpec parse_method_spec(const std::string& text);

/// Runs the full grid.  Cells execute in parallel up to cfg.threads but the
/// returned rows always follow (problem, method, omega) grid order, and every
/// field except cpu_seconds is deterministic.  A failing cell records its
/// status instead of aborting the grid.
std::vector<ResultRow> run_bench(const BenchConfig& cfg);

/// One CSV line per row under the fixed header; titer prints half steps as
/// ".5" and omits the decimal otherwise.
std::string result_csv_header();
std::string to_csv(const ResultRow& row);

/// Executes a single (problem, method, omega, delta) cell.  Shared by
/// run_bench and the solve subcommand so counting conventions stay identical.
struct CellRequest {
  const GeneratedProblem* problem = nullptr;
  std::string problem_label;
  MethodSpec method;
  double omega = 0.1;
  double delta = 0.5;
  double tol = 1e-6;
  std::size_t maxit = 100000;
  bool delta_decay = false;
};

struct CellResult {
  ResultRow row;
  SolveReport report;
  std::vector<double> solution;
  /// (work, relres) pairs for history output; work counts cumulative
  /// iterations in the method's own unit.
  std::vector<std::pair<double, double>> history;
};

CellResult run_cell(const CellRequest& req);

}  // namespace alsp
