/// Command-line front end: generate saddle-point problems, run the solvers,
/// produce spectral-analysis reports, and execute benchmark sweeps.
///
/// Exit codes: 0 = command completed (solver status lives in the CSV),
/// 2 = usage or configuration error, 3 = I/O or format error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "alsp/analysis.hpp"
#include "alsp/bench.hpp"
#include "alsp/problems.hpp"
#include "alsp/saddle.hpp"

namespace {

using nlohmann::json;

std::string fmt_work(double w) {
  if (std::isfinite(w) && w == std::floor(w))
    return std::to_string(static_cast<long long>(w));
  std::ostringstream ss;
  ss << std::setprecision(12) << w;
  return ss.str();
}

/// Accepts either a problem directory (as written by `gen`) or an inline
/// description like "stokes-mac,grid=4,seed=1".
alsp::GeneratedProblem load_or_parse_problem(const std::string& text,
                                             std::string& label) {
  if (std::filesystem::is_directory(text)) {
    alsp::GeneratedProblem gp = alsp::load_problem(text);
    label = gp.system.label.empty() ? text : gp.system.label;
    return gp;
  }
  alsp::BenchProblem bp = alsp::parse_problem_spec(text);
  alsp::GeneratedProblem gp = alsp::generate(bp.spec);
  label = bp.label;
  return gp;
}

void write_text(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << body;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

/// JSON has no representation for non-finite doubles; encode them as strings
/// ("inf", "-inf", "nan") so +infinity bounds survive serialization.
json json_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json json_complex_list(const std::vector<std::complex<double>>& values) {
  json arr = json::array();
  for (const auto& v : values) arr.push_back({json_num(v.real()), json_num(v.imag())});
  return arr;
}

struct GenOptions {
  std::string kind;
  std::size_t grid = 4;
  double nu = 1.0;
  std::string wind = "1,0";
  std::size_t n = 6;
  std::size_t m = 3;
  std::int64_t rank = -1;  // -1: full rank
  double shift = 1.0;
  std::uint64_t seed = 1;
  std::string out = "problem";
};

void run_gen(const GenOptions& opt) {
  alsp::ProblemSpec spec;
  spec.seed = opt.seed;
  if (opt.kind == "stokes-mac") {
    spec.kind = alsp::StokesMacSpec{opt.grid, opt.nu};
  } else if (opt.kind == "oseen-mac") {
    alsp::OseenMacSpec os;
    os.grid = opt.grid;
    os.nu = opt.nu;
    const auto comma = opt.wind.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("--wind expects two numbers 'x,y'");
    try {
      os.wind_x = std::stod(opt.wind.substr(0, comma));
      os.wind_y = std::stod(opt.wind.substr(comma + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("--wind expects two numbers 'x,y'");
    }
    spec.kind = os;
  } else if (opt.kind == "random") {
    alsp::RandomSpec rs;
    rs.n = opt.n;
    rs.m = opt.m;
    rs.rank = opt.rank < 0 ? opt.m : static_cast<std::size_t>(opt.rank);
    rs.symmetric_shift = opt.shift;
    spec.kind = rs;
  } else if (opt.kind == "bb1") {
    spec.kind = alsp::Bb1Spec{};
  } else {
    throw std::invalid_argument(
        "--problem must be one of stokes-mac, oseen-mac, random, bb1 (got '" +
        opt.kind + "')");
  }

  alsp::GeneratedProblem gp = alsp::generate(spec);
  alsp::save_problem(gp, opt.out);
  std::cout << "n=" << gp.system.n() << " m=" << gp.system.m() << " b_rank=";
  if (gp.properties.b_rank)
    std::cout << *gp.properties.b_rank;
  else
    std::cout << "unknown";
  std::cout << "\nwrote " << opt.out << "\n";
}

struct SolveOptions {
  std::string problem;
  std::string method = "spalbb";
  std::size_t restart = 20;
  std::string inner = "lu";
  double omega = 0.1;
  double delta = 0.5;
  double tol = 1e-6;
  std::size_t maxit = 100000;
  bool delta_decay = false;
  std::string history;
};

void run_solve(const SolveOptions& opt) {
  std::string label;
  alsp::GeneratedProblem gp = load_or_parse_problem(opt.problem, label);

  alsp::MethodSpec method;
  method.label = opt.method;
  method.restart = opt.restart;
  method.inner = opt.inner;
  if (opt.method == "spal" || opt.method == "spal-exact")
    method.kind = alsp::MethodKind::spal_exact;
  else if (opt.method == "spal-inexact")
    method.kind = alsp::MethodKind::spal_inexact;
  else if (opt.method == "spalbb")
    method.kind = alsp::MethodKind::spalbb;
  else if (opt.method == "gmres")
    method.kind = alsp::MethodKind::gmres;
  else if (opt.method == "bicgstab")
    method.kind = alsp::MethodKind::bicgstab;
  else
    throw std::invalid_argument(
        "--method must be one of spal-exact, spal-inexact, spalbb, gmres, "
        "bicgstab (got '" + opt.method + "')");
  if (opt.inner != "lu" && opt.inner != "gmres")
    throw std::invalid_argument("--inner must be 'lu' or 'gmres'");

  alsp::CellRequest req;
  req.problem = &gp;
  req.problem_label = label;
  req.method = method;
  req.omega = opt.omega;
  req.delta = opt.delta;
  req.tol = opt.tol;
  req.maxit = opt.maxit;
  req.delta_decay = opt.delta_decay;

  alsp::CellResult cell = alsp::run_cell(req);
  std::cout << alsp::result_csv_header() << "\n"
            << alsp::to_csv(cell.row) << "\n";

  if (!opt.history.empty()) {
    std::ostringstream hist;
    hist << "iteration,relres\n";
    for (const auto& [work, relres] : cell.history)
      hist << fmt_work(work) << ',' << std::setprecision(12) << relres
           << "\n";
    write_text(opt.history, hist.str());
  }
}

struct AnalyzeOptions {
  std::string problem;
  double omega = 1.0;
  double beta = 1.0;
  double delta = 0.5;
  std::string out;
};

void run_analyze(const AnalyzeOptions& opt) {
  std::string label;
  alsp::GeneratedProblem gp = load_or_parse_problem(opt.problem, label);
  const std::size_t size = gp.system.size();
  const std::size_t cap = alsp::dense_cap();
  if (size > cap)
    throw std::invalid_argument(
        "analysis refused: problem size " + std::to_string(size) +
        " exceeds the dense cap " + std::to_string(cap) +
        " (set ALSP_DENSE_CAP to raise it)");

  alsp::ALConfig cfg;
  cfg.omega = opt.omega;
  cfg.beta = opt.beta;
  cfg.delta = opt.delta;
  alsp::SpectralReport rep = alsp::convergence_conditions(gp.system, cfg);

  json j;
  j["problem"] = label;
  j["n"] = gp.system.n();
  j["m"] = gp.system.m();
  j["omega"] = json_num(cfg.omega);
  j["beta"] = json_num(cfg.beta);
  j["delta"] = json_num(cfg.delta);
  j["eta"] = json_num(rep.eta);
  j["lambda1"] = json_num(rep.lambda1);
  j["mu_list"] = json_complex_list(rep.mu_list);
  j["spectral_radius"] = json_num(rep.spectral_radius);
  j["pseudo_spectral_radius"] = json_num(rep.pseudo_spectral_radius);
  j["index_at_most_one"] = rep.index_at_most_one;
  j["nm_norm"] = json_num(rep.nm_norm);
  j["omega_max_exact"] = json_num(rep.omega_max_exact);
  j["delta_max_inexact"] = json_num(rep.delta_max_inexact);
  j["b_rank"] = rep.b_rank;
  j["exact_condition_holds"] = rep.exact_condition_holds;
  j["inexact_condition_holds"] = rep.inexact_condition_holds;
  j["q_structure_verified"] = rep.q_structure_verified;
  j["spectrum_match_error"] = json_num(rep.spectrum_match_error);

  try {
    alsp::Bb2ConditionReport bb2 = alsp::bb2_condition(dense_M(gp.system, cfg));
    j["bb2_condition"] = {{"lhs", json_num(bb2.lhs)},
                          {"w_min", json_num(bb2.w_min)},
                          {"w_max", json_num(bb2.w_max)},
                          {"holds", bb2.condition_holds},
                          {"strict_variant_holds", bb2.strict_variant_holds}};
  } catch (const std::exception& err) {
    j["bb2_condition"] = {{"error", err.what()}};
  }
  try {
    alsp::SpalbbConditionReport sc = alsp::spalbb_condition(gp.system, cfg);
    j["spalbb_condition"] = {{"lhs", json_num(sc.lhs)},
                             {"rhs", json_num(sc.rhs)},
                             {"holds", sc.holds}};
  } catch (const std::exception& err) {
    j["spalbb_condition"] = {{"error", err.what()}};
  }

  write_text(opt.out, j.dump(2) + "\n");
}

struct BenchOptions {
  std::string config;
  std::size_t threads = 0;  // 0: keep the config file's value
  std::string out;
};

void run_bench_cmd(const BenchOptions& opt) {
  std::ifstream in(opt.config);
  if (!in)
    throw std::runtime_error("cannot open config '" + opt.config + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();

  alsp::BenchConfig cfg = alsp::parse_bench_config(buffer.str());
  if (opt.threads > 0) cfg.threads = opt.threads;

  std::vector<alsp::ResultRow> rows = alsp::run_bench(cfg);
  std::ostringstream csv;
  csv << alsp::result_csv_header() << "\n";
  for (const auto& row : rows) csv << alsp::to_csv(row) << "\n";
  write_text(opt.out, csv.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saddle-point solvers with augmented-block splittings"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* cmd_gen = app.add_subcommand(
      "gen", "Generate a problem and write its directory");
  cmd_gen->add_option("--problem", gen.kind,
                      "Kind: stokes-mac, oseen-mac, random, bb1")
      ->required();
  cmd_gen->add_option("--grid", gen.grid, "Pressure cells per side (MAC)");
  cmd_gen->add_option("--nu", gen.nu, "Viscosity (MAC)");
  cmd_gen->add_option("--wind", gen.wind, "Convection wind 'x,y' (oseen-mac)");
  cmd_gen->add_option("--n", gen.n, "Velocity-block size (random)");
  cmd_gen->add_option("--m", gen.m, "Coupling columns (random)");
  cmd_gen->add_option("--rank", gen.rank, "rank(B), default m (random)");
  cmd_gen->add_option("--shift", gen.shift, "Symmetric-part shift (random)");
  cmd_gen->add_option("--seed", gen.seed, "RNG seed");
  cmd_gen->add_option("--out", gen.out, "Output directory");
  cmd_gen->callback([&gen] { run_gen(gen); });

  SolveOptions solve;
  CLI::App* cmd_solve =
      app.add_subcommand("solve", "Run one solver on one problem");
  cmd_solve
      ->add_option("--problem", solve.problem,
                   "Problem directory or inline spec")
      ->required();
  cmd_solve->add_option(
      "--method", solve.method,
      "spal-exact, spal-inexact, spalbb, gmres or bicgstab");
  cmd_solve->add_option("--restart", solve.restart, "GMRES cycle length");
  cmd_solve->add_option("--inner", solve.inner,
                        "Inner solver for spal-inexact: lu or gmres");
  cmd_solve->add_option("--omega", solve.omega, "Augmentation parameter");
  cmd_solve->add_option("--delta", solve.delta, "Inner tolerance fraction");
  cmd_solve->add_option("--tol", solve.tol, "Relative residual target");
  cmd_solve->add_option("--maxit", solve.maxit, "Total iteration cap");
  cmd_solve->add_flag("--delta-decay", solve.delta_decay,
                      "Shrink delta geometrically each sweep");
  cmd_solve->add_option("--history", solve.history,
                        "Write (iteration,relres) CSV here");
  cmd_solve->callback([&solve] { run_solve(solve); });

  AnalyzeOptions analyze;
  CLI::App* cmd_analyze = app.add_subcommand(
      "analyze", "Dense spectral report (JSON) for a desk-sized problem");
  cmd_analyze
      ->add_option("--problem", analyze.problem,
                   "Problem directory or inline spec")
      ->required();
  cmd_analyze->add_option("--omega", analyze.omega, "Augmentation parameter");
  cmd_analyze->add_option("--beta", analyze.beta, "Residual-norm weight");
  cmd_analyze->add_option("--delta", analyze.delta,
                          "Inner tolerance fraction to test");
  cmd_analyze->add_option("--out", analyze.out, "Write JSON here (default stdout)");
  cmd_analyze->callback([&analyze] { run_analyze(analyze); });

  BenchOptions bench;
  CLI::App* cmd_bench =
      app.add_subcommand("bench", "Run a (problem x method x omega) sweep");
  cmd_bench->add_option("--config", bench.config, "key=value config file")
      ->required();
  cmd_bench->add_option("--threads", bench.threads,
                        "Worker threads (overrides config)");
  cmd_bench->add_option("--out", bench.out, "Write CSV here (default stdout)");
  cmd_bench->callback([&bench] { run_bench_cmd(bench); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
