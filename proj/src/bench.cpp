#include "alsp/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "alsp/krylov.hpp"
#include "alsp/spal.hpp"
#include "alsp/spalbb.hpp"

namespace alsp {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string::size_type pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    if (next == std::string::npos) {
      parts.push_back(trim(s.substr(pos)));
      break;
    }
    parts.push_back(trim(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": cannot parse '" + text +
                                "' as a number");
  }
  if (used != text.size() || !std::isfinite(v))
    throw std::invalid_argument(what + ": cannot parse '" + text +
                                "' as a number");
  return v;
}

std::size_t parse_size(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": cannot parse '" + text +
                                "' as a nonnegative integer");
  }
  if (used != text.size())
    throw std::invalid_argument(what + ": cannot parse '" + text +
                                "' as a nonnegative integer");
  return static_cast<std::size_t>(v);
}

/// Splits "key=value" items after the leading kind token.
std::vector<std::pair<std::string, std::string>> key_values(
    const std::vector<std::string>& tokens, const std::string& what) {
  std::vector<std::pair<std::string, std::string>> kv;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens[i].empty()) continue;
    const auto eq = tokens[i].find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(what + ": expected key=value, got '" +
                                  tokens[i] + "'");
    kv.emplace_back(trim(tokens[i].substr(0, eq)),
                    trim(tokens[i].substr(eq + 1)));
  }
  return kv;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string fmt_num(double v) {
  std::ostringstream ss;
  ss << std::setprecision(12) << v;
  return ss.str();
}

std::string fmt_titer(double t) {
  if (std::isfinite(t)) {
    if (t == std::floor(t))
      return std::to_string(static_cast<long long>(t));
    if (2.0 * t == std::floor(2.0 * t)) {
      std::ostringstream ss;
      ss << std::fixed << std::setprecision(1) << t;
      return ss.str();
    }
  }
  return fmt_num(t);
}

const char* kind_name(MethodKind k) {
  switch (k) {
    case MethodKind::spal_exact: return "spal";
    case MethodKind::spal_inexact: return "spal-inexact";
    case MethodKind::spalbb: return "spalbb";
    case MethodKind::gmres: return "gmres";
    case MethodKind::bicgstab: return "bicgstab";
  }
  return "?";
}

std::vector<double> stacked_rhs(const SaddleSystem& sys) {
  std::vector<double> l(sys.size());
  std::copy(sys.f.begin(), sys.f.end(), l.begin());
  std::copy(sys.rhs_g.begin(), sys.rhs_g.end(), l.begin() + sys.n());
  return l;
}

/// (work, relres) pairs for sweep-structured histories: entry 0 sits at work
/// 0, entry k+1 at work_at_outer[k]; any surplus entries (e.g. the trivial
/// {1, 0} history) reuse the last known work coordinate.
std::vector<std::pair<double, double>> pair_outer_history(
    const std::vector<double>& hist, const std::vector<double>& work) {
  std::vector<std::pair<double, double>> out;
  if (hist.empty()) return out;
  out.emplace_back(0.0, hist[0]);
  for (std::size_t k = 1; k < hist.size(); ++k) {
    const double w = k - 1 < work.size()
                         ? work[k - 1]
                         : (work.empty() ? 0.0 : work.back());
    out.emplace_back(w, hist[k]);
  }
  return out;
}

/// Same for step-structured histories where entry k sits at work step*k,
/// capped at the reported total (the final recomputed entry repeats the
/// last work coordinate).
std::vector<std::pair<double, double>> pair_step_history(
    const std::vector<double>& hist, double step, double total) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < hist.size(); ++k)
    out.emplace_back(std::min(step * static_cast<double>(k), total), hist[k]);
  return out;
}

}  // namespace

BenchProblem parse_problem_spec(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("problem: empty description");
  BenchProblem out;
  out.label = t;
  if (t.rfind("dir:", 0) == 0) {
    const std::string path = trim(t.substr(4));
    if (path.empty())
      throw std::invalid_argument("problem: empty directory after 'dir:'");
    out.spec.kind = ImportSpec{path};
    return out;
  }

  const auto tokens = split(t, ',');
  const std::string& kind = tokens[0];
  const auto kv = key_values(tokens, "problem '" + kind + "'");
  auto reject = [&kind](const std::string& key) {
    throw std::invalid_argument("problem '" + kind + "': unknown key '" +
                                key + "'");
  };

  if (kind == "stokes-mac" || kind == "oseen-mac") {
    StokesMacSpec st;
    OseenMacSpec os;
    for (const auto& [key, val] : kv) {
      if (key == "grid") {
        st.grid = os.grid = parse_size(val, "grid");
      } else if (key == "nu") {
        st.nu = os.nu = parse_double(val, "nu");
      } else if (key == "seed") {
        out.spec.seed = parse_size(val, "seed");
      } else if (kind == "oseen-mac" && key == "wind_x") {
        os.wind_x = parse_double(val, "wind_x");
      } else if (kind == "oseen-mac" && key == "wind_y") {
        os.wind_y = parse_double(val, "wind_y");
      } else {
        reject(key);
      }
    }
    if (kind == "stokes-mac")
      out.spec.kind = st;
    else
      out.spec.kind = os;
  } else if (kind == "random") {
    RandomSpec rs;
    bool saw_rank = false;
    for (const auto& [key, val] : kv) {
      if (key == "n")
        rs.n = parse_size(val, "n");
      else if (key == "m")
        rs.m = parse_size(val, "m");
      else if (key == "rank") {
        rs.rank = parse_size(val, "rank");
        saw_rank = true;
      } else if (key == "shift")
        rs.symmetric_shift = parse_double(val, "shift");
      else if (key == "seed")
        out.spec.seed = parse_size(val, "seed");
      else
        reject(key);
    }
    if (!saw_rank) rs.rank = rs.m;  // full rank unless asked otherwise
    out.spec.kind = rs;
  } else if (kind == "bb1") {
    for (const auto& [key, val] : kv) {
      if (key == "seed")
        out.spec.seed = parse_size(val, "seed");
      else
        reject(key);
    }
    out.spec.kind = Bb1Spec{};
  } else {
    throw std::invalid_argument(
        "problem: unknown kind '" + kind +
        "' (expected stokes-mac, oseen-mac, random, bb1 or dir:<path>)");
  }
  return out;
}

MethodSpec parse_method_spec(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("method: empty description");
  const auto tokens = split(t, ',');
  const std::string& kind = tokens[0];

  MethodSpec spec;
  spec.label = t;
  if (kind == "spal")
    spec.kind = MethodKind::spal_exact;
  else if (kind == "spal-inexact")
    spec.kind = MethodKind::spal_inexact;
  else if (kind == "spalbb")
    spec.kind = MethodKind::spalbb;
  else if (kind == "gmres")
    spec.kind = MethodKind::gmres;
  else if (kind == "bicgstab")
    spec.kind = MethodKind::bicgstab;
  else
    throw std::invalid_argument(
        "method: unknown kind '" + kind +
        "' (expected spal, spal-inexact, spalbb, gmres or bicgstab)");

  for (const auto& [key, val] : key_values(tokens, "method '" + kind + "'")) {
    if (key == "restart" && (spec.kind == MethodKind::gmres ||
                             spec.kind == MethodKind::spal_inexact)) {
      spec.restart = parse_size(val, "restart");
      if (spec.restart == 0)
        throw std::invalid_argument("method '" + kind +
                                    "': restart must be positive");
    } else if (key == "inner" && spec.kind == MethodKind::spal_inexact) {
      if (val != "lu" && val != "gmres")
        throw std::invalid_argument("method '" + kind + "': inner must be "
                                    "'lu' or 'gmres', got '" + val + "'");
      spec.inner = val;
    } else {
      throw std::invalid_argument("method '" + kind + "': unknown key '" +
                                  key + "'");
    }
  }
  return spec;
}

BenchConfig parse_bench_config(const std::string& text) {
  BenchConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&lineno](const std::string& msg) {
    throw std::invalid_argument("line " + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty()) fail("empty value for '" + key + "'");

    try {
      if (key == "problem") {
        cfg.problems.push_back(parse_problem_spec(val));
      } else if (key == "method") {
        cfg.methods.push_back(parse_method_spec(val));
      } else if (key == "omega") {
        for (const auto& item : split(val, ',')) {
          const double w = parse_double(item, "omega");
          if (w <= 0.0) throw std::invalid_argument("omega must be positive");
          cfg.omega_list.push_back(w);
        }
      } else if (key == "delta") {
        cfg.delta = parse_double(val, "delta");
        if (cfg.delta < 0.0 || cfg.delta >= 1.0)
          throw std::invalid_argument("delta must lie in [0, 1)");
      } else if (key == "tol") {
        cfg.tol = parse_double(val, "tol");
        if (cfg.tol <= 0.0)
          throw std::invalid_argument("tol must be positive");
      } else if (key == "maxit") {
        cfg.maxit = parse_size(val, "maxit");
      } else if (key == "threads") {
        cfg.threads = parse_size(val, "threads");
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& err) {
      fail(err.what());
    }
  }

  if (cfg.problems.empty())
    throw std::invalid_argument("config declares no problem lines");
  if (cfg.methods.empty())
    throw std::invalid_argument("config declares no method lines");
  if (cfg.omega_list.empty())
    throw std::invalid_argument("config declares no omega values");
  return cfg;
}

CellResult run_cell(const CellRequest& req) {
  if (!req.problem) throw std::invalid_argument("run_cell: null problem");
  const SaddleSystem& sys = req.problem->system;

  ALConfig cfg;
  cfg.omega = req.omega;
  cfg.delta = req.delta;
  cfg.tol = req.tol;
  cfg.maxit = req.maxit;
  cfg.delta_decay = req.delta_decay;

  CellResult out;
  out.row.problem =
      req.problem_label.empty() ? sys.label : req.problem_label;
  out.row.method =
      req.method.label.empty() ? kind_name(req.method.kind) : req.method.label;
  out.row.omega = req.omega;
  out.row.delta = req.delta;

  const auto t0 = std::chrono::steady_clock::now();
  switch (req.method.kind) {
    case MethodKind::spal_exact: {
      SpalResult r = spal_exact(sys, cfg);
      out.report = std::move(r.report);
      out.solution = std::move(r.solution);
      out.row.oiter = out.report.outer_iters;
      out.history =
          pair_outer_history(out.report.residual_history, r.work_at_outer);
      break;
    }
    case MethodKind::spal_inexact: {
      const InnerSolver inner =
          req.method.inner == "gmres"
              ? make_gmres_inner(sys, cfg, req.method.restart)
              : make_lu_inner(sys, cfg);
      SpalResult r = spal_inexact(sys, cfg, inner);
      out.report = std::move(r.report);
      out.solution = std::move(r.solution);
      out.row.oiter = out.report.outer_iters;
      out.history =
          pair_outer_history(out.report.residual_history, r.work_at_outer);
      break;
    }
    case MethodKind::spalbb: {
      SpalbbResult r = spalbb(sys, cfg);
      out.report = std::move(r.report);
      out.solution = std::move(r.solution);
      out.row.oiter = out.report.outer_iters;
      out.history =
          pair_outer_history(out.report.residual_history, r.work_at_outer);
      break;
    }
    case MethodKind::gmres:
    case MethodKind::bicgstab: {
      LinearOp op = [&sys](std::span<const double> in, std::span<double> o) {
        apply_A(sys, in, o);
      };
      const std::vector<double> l = stacked_rhs(sys);
      const std::vector<double> z0(sys.size(), 0.0);
      KrylovConfig kcfg;
      kcfg.restart = req.method.restart;
      kcfg.tol = req.tol;
      kcfg.maxit = req.maxit;
      KrylovResult r = req.method.kind == MethodKind::gmres
                           ? gmres_restarted(op, l, z0, kcfg)
                           : bicgstab(op, l, z0, kcfg);
      out.report = std::move(r.report);
      out.solution = std::move(r.solution);
      out.row.oiter = std::nullopt;  // no outer/inner split to report
      const double step =
          req.method.kind == MethodKind::bicgstab ? 0.5 : 1.0;
      out.history = pair_step_history(out.report.residual_history, step,
                                      out.report.total_iters);
      break;
    }
  }
  out.row.cpu_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  out.row.titer = out.report.total_iters;
  out.row.final_relres = out.report.final_relres;
  out.row.status = out.report.status;
  return out;
}

std::vector<ResultRow> run_bench(const BenchConfig& cfg) {
  if (cfg.problems.empty() || cfg.methods.empty() || cfg.omega_list.empty())
    throw std::invalid_argument(
        "run_bench: needs at least one problem, method and omega");

  // a problem that fails to generate (e.g. a missing import directory) must
  // not abort the grid: its cells all record breakdown rows instead
  std::vector<std::optional<GeneratedProblem>> generated(cfg.problems.size());
  for (std::size_t p = 0; p < cfg.problems.size(); ++p)
    try {
      generated[p] = generate(cfg.problems[p].spec);
    } catch (const std::exception&) {
      // leave the slot empty
    }

  struct Cell {
    CellRequest req;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < cfg.problems.size(); ++p)
    for (const auto& method : cfg.methods)
      for (double omega : cfg.omega_list) {
        CellRequest req;
        req.problem = generated[p] ? &*generated[p] : nullptr;
        req.problem_label = cfg.problems[p].label;
        req.method = method;
        req.omega = omega;
        req.delta = cfg.delta;
        req.tol = cfg.tol;
        req.maxit = cfg.maxit;
        cells.push_back({std::move(req)});
      }

  std::vector<ResultRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      const CellRequest& req = cells[i].req;
      auto mark_failed = [&]() {
        ResultRow& row = rows[i];
        row.problem = req.problem_label;
        row.method = req.method.label.empty() ? kind_name(req.method.kind)
                                              : req.method.label;
        row.omega = req.omega;
        row.delta = req.delta;
        row.titer = 0.0;
        row.final_relres = std::numeric_limits<double>::quiet_NaN();
        row.status = SolveStatus::breakdown;
      };
      if (req.problem == nullptr) {
        mark_failed();
        continue;
      }
      try {
        rows[i] = run_cell(req).row;
      } catch (const std::exception&) {
        mark_failed();
      }
    }
  };

  const std::size_t nthreads =
      std::min(std::max<std::size_t>(1, cfg.threads), cells.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string result_csv_header() {
  return "problem,method,omega,delta,oiter,titer,cpu_seconds,final_relres,"
         "status";
}

std::string to_csv(const ResultRow& row) {
  std::ostringstream ss;
  ss << csv_field(row.problem) << ',' << csv_field(row.method) << ','
     << fmt_num(row.omega) << ',' << fmt_num(row.delta) << ',';
  if (row.oiter) ss << *row.oiter;
  ss << ',' << fmt_titer(row.titer) << ',' << fmt_num(row.cpu_seconds) << ','
     << fmt_num(row.final_relres) << ',' << to_string(row.status);
  return ss.str();
}

}  // namespace alsp
