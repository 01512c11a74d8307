/// Acceptance gate: one pass/fail line per criterion, nonzero exit when any
/// criterion fails.  Tolerances are pinned here on purpose -- do not loosen
/// them to make a failing build green.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "alsp/analysis.hpp"
#include "alsp/bench.hpp"
#include "alsp/krylov.hpp"
#include "alsp/problems.hpp"
#include "alsp/sparse.hpp"
#include "alsp/spal.hpp"
#include "alsp/spalbb.hpp"
#include "test_helpers.hpp"

using namespace alsp;
using namespace testutil;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

SaddleSystem stokes_system(std::size_t grid, std::uint64_t seed = 3) {
  ProblemSpec spec;
  spec.kind = StokesMacSpec{grid, 1.0};
  spec.seed = seed;
  return generate(spec).system;
}

// ---------------------------------------------------------------------------
// 1. Spectrum law: dense spectrum of the sweep operator matches
//    {0 x n, 1 x (m-s), omega*mu/(1+omega*mu)} on 20 seeded instances.
bool criterion1(std::string& detail) {
  double worst = 0.0;
  int count = 0;
  for (int i = 0; i < 10; ++i) {  // full rank
    const std::size_t n = 8 + static_cast<std::size_t>(i),
                      m = 3 + static_cast<std::size_t>(i) / 2;
    ProblemSpec spec;
    spec.kind = RandomSpec{n, m, m, 1.0};
    spec.seed = 100 + static_cast<std::uint64_t>(i);
    ALConfig cfg;
    cfg.omega = (i % 2 == 0) ? 0.1 : 0.5;
    SpectrumReport rep =
        iteration_matrix_spectrum(generate(spec).system, cfg);
    worst = std::max(worst, rep.spectrum_match_error);
    ++count;
  }
  for (int i = 0; i < 10; ++i) {  // rank-deficient
    const std::size_t n = 9 + static_cast<std::size_t>(i),
                      m = 4 + static_cast<std::size_t>(i) / 2;
    ProblemSpec spec;
    spec.kind = RandomSpec{n, m, m - 1 - static_cast<std::size_t>(i) % 2, 1.0};
    spec.seed = 200 + static_cast<std::uint64_t>(i);
    ALConfig cfg;
    cfg.omega = (i % 2 == 0) ? 0.2 : 1.0;
    SpectrumReport rep =
        iteration_matrix_spectrum(generate(spec).system, cfg);
    worst = std::max(worst, rep.spectrum_match_error);
    ++count;
  }
  detail = "worst eigenvalue-match error " + fmt(worst) + " across " +
           std::to_string(count) + " instances (tolerance 1e-7)";
  return count == 20 && worst <= 1e-7;
}

// ---------------------------------------------------------------------------
// 2. Exact-sweep asymptotic rate: toy ratio -> 0.5 within 1e-6 after 30
//    sweeps; staggered-grid measured rate matches the pseudo spectral radius
//    within 5%.
bool criterion2(std::string& detail) {
  ALConfig toycfg;
  toycfg.omega = 1.0;
  toycfg.tol = 1e-300;  // never met: run exactly maxit sweeps
  toycfg.maxit = 32;
  // the toy multiplier solution is 0, so start from y0 = 1: a start with the
  // exact multiplier would converge in a single sweep with nothing to measure
  const std::vector<double> toy_y0 = {1.0};
  SpalResult toy = spal_exact(toy3(), toycfg, toy_y0);
  const auto& h = toy.report.residual_history;
  if (h.size() < 32) {
    detail = "toy run stopped early (" + std::to_string(h.size()) +
             " history entries)";
    return false;
  }
  const double ratio30 = h[31] / h[30];
  const bool toy_ok = std::abs(ratio30 - 0.5) <= 1e-6;

  SaddleSystem stokes = stokes_system(4);
  // calibrate omega so the contraction factor sits in a band where a
  // 50-sweep window stays well above the roundoff floor
  ALConfig probe;
  probe.omega = 1.0;
  double mu_max = 0.0;
  for (const auto& mu : iteration_matrix_spectrum(stokes, probe).mu_list)
    mu_max = std::max(mu_max, mu.real());
  if (mu_max <= 0.0) {
    detail = "no positive pencil eigenvalue on the staggered grid";
    return false;
  }
  const double target_v = 0.7;
  ALConfig scfg;
  scfg.omega = target_v / ((1.0 - target_v) * mu_max);
  scfg.tol = 1e-300;  // never met: run all 60 sweeps
  scfg.maxit = 60;
  const double v =
      iteration_matrix_spectrum(stokes, scfg).pseudo_spectral_radius;
  SpalResult run = spal_exact(stokes, scfg);
  const auto& sh = run.report.residual_history;
  if (sh.size() < 56) {
    detail = "staggered-grid run stopped before the measurement window";
    return false;
  }
  const std::size_t a = 5, b = 55;  // 50 transitions past the transient
  const double measured =
      std::pow(sh[b] / sh[a], 1.0 / static_cast<double>(b - a));
  const bool stokes_ok = std::abs(measured - v) <= 0.05 * v;
  detail = "toy ratio after 30 sweeps " + fmt(ratio30) +
           " (target 0.5 +- 1e-6); grid rate " + fmt(measured) +
           " versus predicted " + fmt(v) + " (5% band)";
  return toy_ok && stokes_ok;
}

// ---------------------------------------------------------------------------
// 3. Semi-convergence on the singular staggered-grid systems, all three
//    solvers, plus the defect-block projection staying at roundoff.
bool criterion3(std::string& detail) {
  std::ostringstream note;
  bool ok = true;
  for (std::size_t grid : {std::size_t{4}, std::size_t{8}}) {
    ProblemSpec pspec;
    pspec.kind = StokesMacSpec{grid, 1.0};
    pspec.seed = 3;
    GeneratedProblem prob = generate(pspec);
    const SaddleSystem& sys = prob.system;
    const double lnorm = norm2_of(stacked_rhs(sys));

    ALConfig cfg;
    cfg.omega = 1e-2;
    cfg.tol = 1e-6;
    cfg.maxit = 100000;

    auto check_solution = [&](const char* name, SolveStatus status,
                              const std::vector<double>& z) {
      const double relres =
          norm2_of(system_residual(sys, z)) / std::max(1e-300, lnorm);
      const bool good = status == SolveStatus::converged && relres <= 1e-5;
      if (!good) {
        ok = false;
        note << " [" << name << " N=" << grid << " status "
             << to_string(status) << " relres " << fmt(relres) << "]";
      }
      return relres;
    };

    SpalOptions opts;
    opts.record_iterates = true;
    SpalResult exact = spal_exact(sys, cfg, {}, opts);
    check_solution("exact", exact.report.status, exact.solution);

    // delta chosen from the verified bound; the rank-deficient norm is 1,
    // so the admissible inexact slack collapses to zero (LU inner meets it)
    SpectralReport rep = convergence_conditions(sys, cfg);
    ALConfig icfg = cfg;
    icfg.delta = std::max(0.0, std::min(0.999 * rep.delta_max_inexact, 0.5));
    SpalResult inex =
        spal_inexact(sys, icfg, make_lu_inner(sys, icfg));
    check_solution("inexact", inex.report.status, inex.solution);

    ALConfig bbcfg = cfg;
    bbcfg.delta = 0.5;
    SpalbbResult bb = spalbb(sys, bbcfg);
    check_solution("bb", bb.report.status, bb.solution);

    // defect projection: residual component outside the solvable block
    std::vector<std::vector<double>> residuals;
    for (const auto& z : exact.iterates)
      residuals.push_back(system_residual(sys, z));
    const double r0 = norm2_of(residuals.front());
    SvdBlockReport proj = residual_block_decomposition(sys, residuals);
    double worst_defect = 0.0;
    for (std::size_t k = 1; k < proj.residual_null_component.size(); ++k)
      worst_defect = std::max(worst_defect, proj.residual_null_component[k]);
    if (worst_defect > 1e-10 * r0) {
      ok = false;
      note << " [defect component " << fmt(worst_defect / r0)
           << " of r0 at N=" << grid << "]";
    }
  }
  detail = ok ? "exact/inexact/bb all converged on N=4,8 with true residual "
                "<= 1e-5 and defect projection <= 1e-10*r0"
              : "failures:" + note.str();
  return ok;
}

// ---------------------------------------------------------------------------
// 4. One-sweep contraction bound for the inexact iteration, measured in the
//    weighted residual norm: ratio <= nm + delta*(1+nm) + 1e-10.
bool criterion4(std::string& detail) {
  struct Case {
    SaddleSystem sys;
    double omega, delta;
    std::size_t restart;
    std::vector<double> z0;
  };
  std::vector<Case> cases;
  // toy start carries a pure multiplier error; one-step inner cycles keep the
  // sweeps genuinely inexact
  cases.push_back({toy3(), 1.0, 0.14, 1, {0.0, 0.0, 1.0}});
  ProblemSpec spec;
  spec.kind = RandomSpec{8, 4, 4, 1.0};
  spec.seed = 301;
  cases.push_back(
      {generate(spec).system, 0.1, -1.0, 2, {}});  // delta from report

  double worst_margin = -kInf;
  for (auto& c : cases) {
    ALConfig cfg;
    cfg.omega = c.omega;
    cfg.beta = 1.0;
    cfg.tol = 1e-6;
    SpectralReport rep = convergence_conditions(c.sys, cfg);
    const double nm = rep.nm_norm;
    cfg.delta = c.delta > 0 ? c.delta : 0.9 * rep.delta_max_inexact;
    // the configuration must actually satisfy the inexact conditions
    ALConfig probecfg = cfg;
    if (!convergence_conditions(c.sys, probecfg).inexact_condition_holds) {
      detail = "configuration failed the inexact admissibility check";
      return false;
    }
    WeightedNorm pnorm =
        WeightedNorm::p_beta(cfg.beta, cfg.q_mode, c.sys.n(), c.sys.m());
    SpalOptions opts;
    opts.record_iterates = true;
    SpalResult run = spal_inexact(
        c.sys, cfg,
        make_gmres_inner(c.sys, cfg, c.restart, 100000, pnorm), c.z0, opts,
        pnorm);
    if (run.report.status != SolveStatus::converged) {
      detail = std::string("inexact run ended with status ") +
               to_string(run.report.status);
      return false;
    }
    const double bound = nm + cfg.delta * (1.0 + nm) + 1e-10;
    std::vector<double> pn;
    for (const auto& z : run.iterates)
      pn.push_back(pnorm(system_residual(c.sys, z)));
    for (std::size_t k = 0; k + 1 < pn.size(); ++k) {
      if (pn[k] <= 0.0) continue;
      const double ratio = pn[k + 1] / pn[k];
      worst_margin = std::max(worst_margin, ratio - bound);
      if (ratio > bound) {
        detail = "sweep " + std::to_string(k) + " ratio " + fmt(ratio) +
                 " exceeded bound " + fmt(bound);
        return false;
      }
    }
  }
  detail = "all sweeps within nm + delta*(1+nm) + 1e-10; worst margin " +
           fmt(worst_margin);
  return true;
}

// ---------------------------------------------------------------------------
// 5. First-form step-size counterexample: exact doubling orbit and the
//    documented 4-versus-8 growth discrepancy.
bool criterion5(std::string& detail) {
  Bb1DivergenceReport rep = bb1_divergence_demo({1.0, 0.0}, 3);
  const std::vector<std::array<double, 2>> expect = {
      {1.0, 0.0}, {0.0, 2.0}, {-4.0, 0.0}, {0.0, -8.0}};
  bool ok = rep.iterates.size() == expect.size();
  if (ok)
    for (std::size_t k = 0; k < expect.size(); ++k)
      ok = ok && rep.iterates[k] == expect[k];
  ok = ok && rep.norm_ratios.size() == 3;
  if (ok)
    for (double q : rep.norm_ratios) ok = ok && q == 2.0;
  ok = ok && rep.squared_growth_per_step == 4.0 &&
       rep.squared_growth_quoted == 8.0 && rep.growth_quote_mismatch;
  detail = ok ? "orbit (1,0)->(0,2)->(-4,0)->(0,-8) exact; ratios exactly 2; "
                "quoted squared growth 8 vs derived 4 flagged"
              : "orbit or growth report mismatch";
  return ok;
}

// ---------------------------------------------------------------------------
// 6. Second-form steps converge under the eigenvalue condition and stay in
//    the inverse-eigenvalue interval.
bool criterion6(std::string& detail) {
  struct Instance {
    DenseMatrix a;
    std::string name;
  };
  std::vector<Instance> instances;
  instances.push_back({dense_of(2, 2, {2, 0.1, -0.1, 2}), "rotation"});
  Rng rng(61);
  for (int i = 0; i < 10; ++i) {
    const std::size_t n = 4 + static_cast<std::size_t>(i % 4);
    DenseMatrix a(n, n);
    a.values = random_upd_dense(n, 4.0, rng);
    instances.push_back({std::move(a), "updm" + std::to_string(i)});
  }

  std::size_t worst_steps = 0;
  double worst_escape = 0.0;
  for (const auto& inst : instances) {
    Bb2ConditionReport cond = bb2_condition(inst.a);
    if (!cond.condition_holds) {
      detail = inst.name + " does not satisfy the step-size condition";
      return false;
    }
    const std::size_t n = inst.a.rows;
    LinearOp op = [&inst, n](std::span<const double> in,
                             std::span<double> out) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          s += inst.a.values[i * n + j] * in[j];
        out[i] = s;
      }
    };
    Rng rhs_rng(71);
    std::vector<double> rhs(n);
    for (auto& v : rhs) v = rhs_rng.uniform(-1, 1);
    const double target = 1e-10 * norm2_of(rhs);
    BBState state;
    state.z_cur.assign(n, 0.0);
    std::vector<double> alpha_log;
    InnerSolveResult run =
        bb2_run(op, rhs, state, target, 500, &alpha_log, nullptr, nullptr);
    if (run.achieved_residual > target) {
      detail = inst.name + " missed 1e-10*r0 within 500 steps (achieved " +
               fmt(run.achieved_residual / norm2_of(rhs)) + ")";
      return false;
    }
    worst_steps = std::max(worst_steps, alpha_log.size());
    for (double alpha : alpha_log) {
      const double lo = 1.0 / cond.w_max - 1e-12;
      const double hi = 1.0 / cond.w_min + 1e-12;
      worst_escape = std::max(
          worst_escape,
          std::max(lo - alpha, alpha - hi));
      if (alpha < lo || alpha > hi) {
        detail = inst.name + " step size " + fmt(alpha) +
                 " left [1/w_max, 1/w_min] = [" + fmt(1.0 / cond.w_max) +
                 ", " + fmt(1.0 / cond.w_min) + "]";
        return false;
      }
    }
  }
  detail = "11 instances converged to 1e-10*r0 (max " +
           std::to_string(worst_steps) +
           " steps); every step size inside the interval (worst escape " +
           fmt(worst_escape) + ")";
  return true;
}

// ---------------------------------------------------------------------------
// 7. Cross-method agreement on the convected staggered-grid system, compared
//    through null-space-insensitive residual functionals.
bool criterion7(std::string& detail) {
  ProblemSpec spec;
  spec.kind = OseenMacSpec{8, 1.0, 1.0, 0.0};
  spec.seed = 3;
  GeneratedProblem prob = generate(spec);
  const SaddleSystem& sys = prob.system;
  const double lnorm = norm2_of(stacked_rhs(sys));

  CellRequest req;
  req.problem = &prob;
  req.problem_label = "oseen8";
  req.delta = 0.5;
  req.tol = 1e-6;
  req.maxit = 100000;

  req.method = parse_method_spec("spalbb");
  req.omega = 1e-3;
  CellResult bb = run_cell(req);
  req.method = parse_method_spec("gmres,restart=20");
  CellResult gm = run_cell(req);
  req.method = parse_method_spec("bicgstab");
  CellResult bi = run_cell(req);

  struct Named {
    const char* name;
    const CellResult* r;
  };
  const std::vector<Named> runs = {{"bb", &bb}, {"gmres", &gm},
                                   {"bicgstab", &bi}};
  for (const auto& nr : runs)
    if (nr.r->row.status != SolveStatus::converged ||
        norm2_of(system_residual(sys, nr.r->solution)) > 1e-6 * lnorm * 1.5) {
      detail = std::string(nr.name) + " did not reach the 1e-6 target (" +
               to_string(nr.r->row.status) + ", relres " +
               fmt(norm2_of(system_residual(sys, nr.r->solution)) / lnorm) +
               ")";
      return false;
    }

  const std::size_t n = sys.n(), m = sys.m();
  auto defect = [&](const std::vector<double>& z1,
                    const std::vector<double>& z2) {
    std::vector<double> dx(n), dy(m);
    for (std::size_t i = 0; i < n; ++i) dx[i] = z1[i] - z2[i];
    for (std::size_t j = 0; j < m; ++j) dy[j] = z1[n + j] - z2[n + j];
    std::vector<double> btdx(m), gdx(n), bdy(n);
    spmv_transpose(sys.b, dx, btdx);
    spmv(sys.g, dx, gdx);
    spmv(sys.b, dy, bdy);
    for (std::size_t i = 0; i < n; ++i) gdx[i] += bdy[i];
    return norm2_of(btdx) + norm2_of(gdx);
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = i + 1; j < runs.size(); ++j)
      worst = std::max(worst,
                       defect(runs[i].r->solution, runs[j].r->solution));
  detail = "three methods converged; worst pairwise defect " + fmt(worst) +
           " <= 1e-4*|l| = " + fmt(1e-4 * lnorm);
  return worst <= 1e-4 * lnorm;
}

// ---------------------------------------------------------------------------
// 8. Outer-sweep count falls as omega falls; predicted contraction radius
//    rises with omega.
bool criterion8(std::string& detail) {
  SaddleSystem sys = stokes_system(8);
  const std::vector<double> omegas = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<std::size_t> outers;
  for (double w : omegas) {
    ALConfig cfg;
    cfg.omega = w;
    cfg.delta = 0.5;
    cfg.tol = 1e-6;
    cfg.maxit = 100000;
    SpalbbResult r = spalbb(sys, cfg);
    if (r.report.status != SolveStatus::converged) {
      detail = "solver failed at omega " + fmt(w) + " (" +
               to_string(r.report.status) + ")";
      return false;
    }
    outers.push_back(r.report.outer_iters);
  }
  for (std::size_t k = 1; k < outers.size(); ++k)
    if (outers[k] > outers[k - 1]) {
      detail = "outer sweeps increased from " + std::to_string(outers[k - 1]) +
               " to " + std::to_string(outers[k]) + " when omega fell to " +
               fmt(omegas[k]);
      return false;
    }

  double prev = -kInf;
  for (double w : omegas) {
    ALConfig cfg;
    cfg.omega = w;
    const double rho = iteration_matrix_spectrum(sys, cfg).spectral_radius;
    if (prev > rho + 1e-10) {
      detail = "spectral radius decreased in omega (" + fmt(prev) + " -> " +
               fmt(rho) + ")";
      return false;
    }
    prev = std::max(prev, rho);
  }
  std::string counts;
  for (std::size_t k = 0; k < outers.size(); ++k)
    counts += (k ? "," : "") + std::to_string(outers[k]);
  detail = "outer sweeps " + counts +
           " nonincreasing across omega = 1e-1..1e-5; spectral radius "
           "nondecreasing (tolerance 1e-10)";
  return true;
}

// ---------------------------------------------------------------------------
// 9. Quotient bound: analytic toys exact, pencil value ties or beats a
//    million-sample descent oracle, and the admissible-omega report.
bool criterion9(std::string& detail) {
  const double eta_plus = compute_eta(toy3(), QMode::identity());
  const double eta_minus = compute_eta(indefinite_toy(), QMode::identity());
  if (std::abs(eta_plus - 1.0) > 1e-10 || std::abs(eta_minus + 1.0) > 1e-10) {
    detail = "toy quotient bounds off: " + fmt(eta_plus) + ", " +
             fmt(eta_minus);
    return false;
  }

  ALConfig cfg;
  cfg.omega = 0.4;
  SpectralReport rep = convergence_conditions(indefinite_toy(), cfg);
  if (std::abs(rep.omega_max_exact - 0.5) > 1e-10) {
    detail = "admissible omega ceiling " + fmt(rep.omega_max_exact) +
             " (expected 0.5)";
    return false;
  }

  const std::array<std::uint64_t, 5> seeds = {401, 402, 403, 404, 405};
  const std::array<std::size_t, 5> ranks = {4, 4, 3, 2, 4};
  const std::array<double, 5> shifts = {0.4, 1.0, 0.7, 0.4, 1.3};
  double worst_gap = -kInf;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    ProblemSpec spec;
    spec.kind = RandomSpec{8 + i, 4, ranks[i], shifts[i]};
    spec.seed = seeds[i];
    SaddleSystem sys = generate(spec).system;
    const double pencil = compute_eta(sys, QMode::identity());
    const double oracle =
        eta_bruteforce(sys, QMode::identity(), 9000 + i, 1000000);
    worst_gap = std::max(worst_gap, pencil - oracle);
    if (pencil > oracle + 1e-8) {
      detail = "pencil value " + fmt(pencil) + " above the oracle " +
               fmt(oracle) + " on instance " + std::to_string(i);
      return false;
    }
  }
  detail = "toys exact to 1e-10; omega ceiling 0.5 for the indefinite toy; "
           "pencil <= oracle + 1e-8 on 5 instances (worst gap " +
           fmt(worst_gap) + ")";
  return true;
}

// ---------------------------------------------------------------------------
// 10. Weighted splitting norm is nondecreasing in the multiplier weight and
//     reproduces the closed-form toy value.
bool criterion10(std::string& detail) {
  SaddleSystem toy = toy3();
  ALConfig tcfg;
  tcfg.omega = 1.0;
  tcfg.beta = 1.0;
  const double toy_nm = nm_norm(toy, tcfg);
  if (std::abs(toy_nm - std::sqrt(0.5)) > 1e-10) {
    detail = "toy splitting norm " + fmt(toy_nm) + " (expected sqrt(1/2))";
    return false;
  }

  ProblemSpec spec;
  spec.kind = RandomSpec{8, 4, 4, 1.0};
  spec.seed = 501;
  SaddleSystem sys = generate(spec).system;
  double prev = -kInf;
  std::string values;
  for (double beta : {0.01, 0.1, 0.3}) {
    ALConfig cfg;
    cfg.omega = 0.5;
    cfg.beta = beta;
    const double v = nm_norm(sys, cfg);
    values += (values.empty() ? "" : ", ") + fmt(v);
    if (v < prev - 1e-12) {
      detail = "norm decreased when the weight grew (" + values + ")";
      return false;
    }
    prev = v;
  }
  detail = "toy value sqrt(1/2) to 1e-10; weighted norm nondecreasing over "
           "beta = 0.01, 0.1, 0.3 (" + values + ")";
  return true;
}

// ---------------------------------------------------------------------------
// 11. Benchmark protocol: fixed CSV schema, counting conventions, and
//     thread-count invariance of everything but the timing column.
bool criterion11(std::string& detail) {
  const std::string config_text =
      "problem = random,n=6,m=3,seed=5\n"
      "problem = stokes-mac,grid=4,seed=3\n"
      "method = spal\n"
      "method = spalbb\n"
      "method = bicgstab\n"
      "omega = 1e-1, 1e-2, 1e-3\n";
  BenchConfig cfg = parse_bench_config(config_text);
  if (cfg.delta != 0.5 || cfg.tol != 1e-6 || cfg.maxit != 100000) {
    detail = "default protocol parameters off (delta " + fmt(cfg.delta) +
             ", tol " + fmt(cfg.tol) + ", maxit " +
             std::to_string(cfg.maxit) + ")";
    return false;
  }
  if (result_csv_header() !=
      "problem,method,omega,delta,oiter,titer,cpu_seconds,final_relres,"
      "status") {
    detail = "csv header drifted: " + result_csv_header();
    return false;
  }

  cfg.threads = 1;
  std::vector<ResultRow> a = run_bench(cfg);
  cfg.threads = 3;
  std::vector<ResultRow> b = run_bench(cfg);
  if (a.size() != 18 || b.size() != 18) {
    detail = "grid produced " + std::to_string(a.size()) + "/" +
             std::to_string(b.size()) + " rows (expected 18)";
    return false;
  }
  auto strip_timing = [](const ResultRow& row) {
    ResultRow c = row;
    c.cpu_seconds = 0.0;
    return to_csv(c);
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (strip_timing(a[i]) != strip_timing(b[i])) {
      detail = "row " + std::to_string(i) +
               " differs across thread counts: " + strip_timing(a[i]) +
               " versus " + strip_timing(b[i]);
      return false;
    }
    const ResultRow& row = a[i];
    if (row.status != SolveStatus::converged) {
      detail = "cell " + row.problem + "/" + row.method + " at omega " +
               fmt(row.omega) + " ended " + to_string(row.status);
      return false;
    }
    const bool krylov = row.method.find("bicgstab") != std::string::npos;
    if (krylov != !row.oiter.has_value()) {
      detail = "outer-count column convention broken on " + row.method;
      return false;
    }
    const double doubled = 2.0 * row.titer;
    if (std::abs(doubled - std::round(doubled)) > 1e-9) {
      detail = row.method + " total count " + fmt(row.titer) +
               " is not a half integer";
      return false;
    }
    if (!krylov &&
        std::abs(row.titer - std::round(row.titer)) > 1e-9 &&
        row.method == "spal") {
      detail = "exact sweeps reported a fractional count";
      return false;
    }
    if (row.delta != 0.5) {
      detail = "delta column drifted to " + fmt(row.delta);
      return false;
    }
  }
  detail = "18-row grid stable across 1 and 3 threads; header, outer-count "
           "blanks, half-step totals and defaults all per protocol";
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* title;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "sweep-operator spectrum law", criterion1},
      {2, "exact-sweep asymptotic rate", criterion2},
      {3, "semi-convergence on singular systems", criterion3},
      {4, "inexact one-sweep contraction bound", criterion4},
      {5, "first-form step-size divergence demo", criterion5},
      {6, "second-form step convergence and bounds", criterion6},
      {7, "cross-method solution agreement", criterion7},
      {8, "omega trend for sweeps and spectra", criterion8},
      {9, "quotient bound versus sampling oracle", criterion9},
      {10, "weighted-norm monotonicity", criterion10},
      {11, "benchmark protocol fidelity", criterion11},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %d: %s -- %s\n", ok ? "PASS" : "FAIL", c.number,
                c.title, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
