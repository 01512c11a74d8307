#include "alsp/problems.hpp"

#include <Eigen/Dense>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "alsp/analysis.hpp"
#include "alsp/io.hpp"
#include "alsp/rng.hpp"
#include "eigen_util.hpp"

namespace alsp {

namespace {

namespace fs = std::filesystem;

/// Staggered-grid block assembly shared by the Stokes and Oseen kinds.
/// Velocity layout: u(i,j) lives on the interior vertical face x = i*h
/// (i = 1..N-1, j = 0..N-1), v(i,j) on the interior horizontal face y = j*h
/// (i = 0..N-1, j = 1..N-1); pressures sit at cell centers.
struct MacBlocks {
  SparseMatrix g;
  SparseMatrix b;
  std::size_t n = 0, m = 0;
};

MacBlocks assemble_mac(std::size_t grid, double nu, bool convect,
                       double wind_x, double wind_y) {
  if (grid < 2) throw std::invalid_argument("mac grid: need at least 2 cells");
  const std::size_t N = grid;
  const double h = 1.0 / static_cast<double>(N);
  const std::size_t nu_count = (N - 1) * N;  // u unknowns
  const std::size_t n = 2 * nu_count;
  const std::size_t m = N * N;

  auto uidx = [&](std::size_t i, std::size_t j) {  // i in 1..N-1, j in 0..N-1
    return j * (N - 1) + (i - 1);
  };
  auto vidx = [&](std::size_t i, std::size_t j) {  // i in 0..N-1, j in 1..N-1
    return nu_count + (j - 1) * N + i;
  };
  auto pidx = [&](std::size_t i, std::size_t j) { return j * N + i; };

  const double lap_diag = 4.0 * nu / (h * h);
  const double lap_off = -nu / (h * h);
  const double cx = wind_x / (2.0 * h);
  const double cy = wind_y / (2.0 * h);

  std::vector<Triplet> gt;
  std::vector<Triplet> bt;

  // u momentum rows: diffusion plus optional centered convection; the
  // pressure gradient couples the two cells sharing the face.
  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t i = 1; i <= N - 1; ++i) {
      const std::size_t r = uidx(i, j);
      gt.push_back({r, r, lap_diag});
      if (i > 1) gt.push_back({r, uidx(i - 1, j), lap_off - (convect ? cx : 0.0)});
      if (i < N - 1)
        gt.push_back({r, uidx(i + 1, j), lap_off + (convect ? cx : 0.0)});
      if (j > 0) gt.push_back({r, uidx(i, j - 1), lap_off - (convect ? cy : 0.0)});
      if (j < N - 1)
        gt.push_back({r, uidx(i, j + 1), lap_off + (convect ? cy : 0.0)});
      bt.push_back({r, pidx(i, j), 1.0 / h});
      bt.push_back({r, pidx(i - 1, j), -1.0 / h});
    }
  }
  // v momentum rows.
  for (std::size_t j = 1; j <= N - 1; ++j) {
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t r = vidx(i, j);
      gt.push_back({r, r, lap_diag});
      if (i > 0) gt.push_back({r, vidx(i - 1, j), lap_off - (convect ? cx : 0.0)});
      if (i < N - 1)
        gt.push_back({r, vidx(i + 1, j), lap_off + (convect ? cx : 0.0)});
      if (j > 1) gt.push_back({r, vidx(i, j - 1), lap_off - (convect ? cy : 0.0)});
      if (j < N - 1)
        gt.push_back({r, vidx(i, j + 1), lap_off + (convect ? cy : 0.0)});
      bt.push_back({r, pidx(i, j), 1.0 / h});
      bt.push_back({r, pidx(i, j - 1), -1.0 / h});
    }
  }

  MacBlocks blocks;
  blocks.g = from_triplets(n, n, std::move(gt));
  blocks.b = from_triplets(n, m, std::move(bt));
  blocks.n = n;
  blocks.m = m;
  return blocks;
}

SparseMatrix dense_to_sparse(const Eigen::MatrixXd& d) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j)
      t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                   d(i, j)});
  return from_triplets(static_cast<std::size_t>(d.rows()),
                       static_cast<std::size_t>(d.cols()), std::move(t));
}

Eigen::MatrixXd random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd r(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = 0; j < r.cols(); ++j) r(i, j) = rng.uniform(-1, 1);
  return r;
}

struct Blocks {
  SparseMatrix g;
  SparseMatrix b;
  std::optional<std::size_t> structural_rank;
  std::optional<bool> structural_upd;
  std::string kind;
  std::map<std::string, std::string> meta;
};

Blocks build_blocks(const ProblemSpec& spec, Rng& rng) {
  Blocks out;
  if (const auto* st = std::get_if<StokesMacSpec>(&spec.kind)) {
    if (!(st->nu > 0.0))
      throw std::invalid_argument("stokes-mac: nu must be > 0");
    MacBlocks mb = assemble_mac(st->grid, st->nu, false, 0, 0);
    out.g = std::move(mb.g);
    out.b = std::move(mb.b);
    out.structural_rank = mb.m - 1;  // only constants in the kernel of B
    out.structural_upd = true;
    out.kind = "stokes-mac";
    out.meta["grid"] = std::to_string(st->grid);
    out.meta["nu"] = std::to_string(st->nu);
  } else if (const auto* os = std::get_if<OseenMacSpec>(&spec.kind)) {
    if (!(os->nu > 0.0))
      throw std::invalid_argument("oseen-mac: nu must be > 0");
    MacBlocks mb = assemble_mac(os->grid, os->nu, true, os->wind_x, os->wind_y);
    out.g = std::move(mb.g);
    out.b = std::move(mb.b);
    out.structural_rank = mb.m - 1;
    out.structural_upd = true;  // symmetric part is the diffusion block
    out.kind = "oseen-mac";
    out.meta["grid"] = std::to_string(os->grid);
    out.meta["nu"] = std::to_string(os->nu);
    out.meta["wind"] =
        std::to_string(os->wind_x) + ":" + std::to_string(os->wind_y);
  } else if (const auto* rs = std::get_if<RandomSpec>(&spec.kind)) {
    if (rs->m > rs->n) throw std::invalid_argument("random: need n >= m");
    if (rs->rank > rs->m) throw std::invalid_argument("random: rank > m");
    const auto n = static_cast<Eigen::Index>(rs->n);
    const auto m = static_cast<Eigen::Index>(rs->m);
    const auto s = static_cast<Eigen::Index>(rs->rank);
    // G = shift*I + F^T F / n + skew(S)
    Eigen::MatrixXd f = random_matrix(rng, rs->n, rs->n);
    Eigen::MatrixXd sk = random_matrix(rng, rs->n, rs->n);
    Eigen::MatrixXd g = rs->symmetric_shift *
                            Eigen::MatrixXd::Identity(n, n) +
                        (f.transpose() * f) / static_cast<double>(rs->n) +
                        0.5 * (sk - sk.transpose());
    // B = U_s * diag(sigma) * V_s^T with sigma in [1,2]: rank exactly s.
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, m);
    if (s > 0) {
      Eigen::MatrixXd lu = random_matrix(rng, rs->n, rs->rank);
      Eigen::MatrixXd rv = random_matrix(rng, rs->m, rs->rank);
      Eigen::VectorXd sigma(s);
      for (Eigen::Index k = 0; k < s; ++k) sigma(k) = rng.uniform(1, 2);
      Eigen::HouseholderQR<Eigen::MatrixXd> qrl(lu), qrr(rv);
      Eigen::MatrixXd us =
          qrl.householderQ() * Eigen::MatrixXd::Identity(n, s);
      Eigen::MatrixXd vs =
          qrr.householderQ() * Eigen::MatrixXd::Identity(m, s);
      b = us * sigma.asDiagonal() * vs.transpose();
    }
    out.g = dense_to_sparse(g);
    out.b = dense_to_sparse(b);
    out.structural_rank = rs->rank;
    if (rs->symmetric_shift > 0.0) out.structural_upd = true;
    out.kind = "random";
    out.meta["rank"] = std::to_string(rs->rank);
    out.meta["shift"] = std::to_string(rs->symmetric_shift);
  } else if (std::get_if<Bb1Spec>(&spec.kind)) {
    out.g = from_triplets(2, 2,
                          {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, -2.0}, {1, 1, 1.0}});
    out.b = from_triplets(2, 0, {});
    out.structural_rank = 0;
    out.kind = "bb1";
  } else {
    throw std::invalid_argument("build_blocks: import specs are loaded, not built");
  }
  return out;
}

ProblemProperties compute_properties(const SaddleSystem& sys,
                                     std::optional<std::size_t> structural_rank,
                                     std::optional<bool> structural_upd) {
  ProblemProperties props;
  props.b_rank = structural_rank;
  props.g_is_upd = structural_upd;
  if (sys.size() > dense_cap()) return props;

  Eigen::MatrixXd g = detail::to_eigen(sys.g);
  Eigen::MatrixXd h = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  props.h_min_eig = eig.eigenvalues()(0);
  props.g_is_upd = *props.h_min_eig > 0.0;

  if (sys.m() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::to_eigen(sys.b));
    const auto& sv = svd.singularValues();
    const double cut = kRankTolerance * sv(0);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cut) ++rank;
    props.b_rank = rank;
  } else {
    props.b_rank = 0;
  }
  return props;
}

std::string meta_line(const std::string& key, const std::string& value) {
  return key + "=" + value + "\n";
}

}  // namespace

std::size_t dense_cap() {
  if (const char* env = std::getenv("ALSP_DENSE_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 2000;
}

GeneratedProblem generate(const ProblemSpec& spec) {
  if (const auto* imp = std::get_if<ImportSpec>(&spec.kind))
    return load_problem(imp->path);

  Rng rng(spec.seed);
  Blocks blocks = build_blocks(spec, rng);

  GeneratedProblem p;
  p.system.g = std::move(blocks.g);
  p.system.b = std::move(blocks.b);
  const std::size_t n = p.system.g.rows, m = p.system.b.cols;

  std::vector<double> zstar(n + m, 0.0);
  if (!std::holds_alternative<Bb1Spec>(spec.kind)) {
    for (double& v : zstar) v = rng.uniform(-1, 1);
  }
  // Manufactured right-hand side keeps rank-deficient systems consistent.
  p.system.f.resize(n);
  p.system.rhs_g.resize(m);
  std::span<const double> xs(zstar.data(), n);
  std::span<const double> ys(zstar.data() + n, m);
  std::vector<double> by(n, 0.0);
  spmv(p.system.g, xs, std::span<double>(p.system.f));
  if (m > 0) {
    spmv(p.system.b, ys, std::span<double>(by));
    for (std::size_t i = 0; i < n; ++i) p.system.f[i] += by[i];
    std::vector<double> btx(m);
    spmv_transpose(p.system.b, xs, std::span<double>(btx));
    for (std::size_t j = 0; j < m; ++j) p.system.rhs_g[j] = -btx[j];
  }
  p.reference_solution = std::move(zstar);

  p.system.b_rank = blocks.structural_rank;
  p.system.validate();
  p.properties =
      compute_properties(p.system, blocks.structural_rank, blocks.structural_upd);
  if (p.properties.b_rank) p.system.b_rank = p.properties.b_rank;

  // Generator identity doubles as the problem label.
  std::string params;
  for (const auto& [k, v] : blocks.meta) params += "," + k + "=" + v;
  p.system.label = blocks.kind + params + ",seed=" + std::to_string(spec.seed);
  return p;
}

void save_problem(const GeneratedProblem& p, const std::string& dir) {
  fs::create_directories(dir);
  write_matrix_market(dir + "/G.mtx", p.system.g);
  write_matrix_market(dir + "/B.mtx", p.system.b);
  write_vector_file(dir + "/f.vec", p.system.f);
  write_vector_file(dir + "/g.vec", p.system.rhs_g);
  std::ofstream meta(dir + "/meta.txt");
  if (!meta) throw std::runtime_error("cannot open " + dir + "/meta.txt");
  meta << meta_line("kind", p.system.label)
       << meta_line("n", std::to_string(p.system.n()))
       << meta_line("m", std::to_string(p.system.m()));
  if (p.system.b_rank)
    meta << meta_line("b_rank", std::to_string(*p.system.b_rank));
}

GeneratedProblem load_problem(const std::string& dir) {
  for (const char* name : {"G.mtx", "B.mtx", "f.vec", "g.vec", "meta.txt"}) {
    if (!fs::exists(fs::path(dir) / name))
      throw std::runtime_error("problem directory " + dir + " is missing " +
                               name);
  }
  GeneratedProblem p;
  p.system.g = read_matrix_market(dir + "/G.mtx");
  p.system.b = read_matrix_market(dir + "/B.mtx");
  p.system.f = read_vector_file(dir + "/f.vec");
  p.system.rhs_g = read_vector_file(dir + "/g.vec");

  std::ifstream meta(dir + "/meta.txt");
  std::string line;
  std::map<std::string, std::string> kv;
  while (std::getline(meta, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  p.system.label = kv.count("kind") ? kv["kind"] : dir;
  std::optional<std::size_t> structural_rank;
  if (kv.count("b_rank")) structural_rank = std::stoul(kv["b_rank"]);
  p.system.b_rank = structural_rank;
  p.system.validate();
  p.properties = compute_properties(p.system, structural_rank, std::nullopt);
  if (p.properties.b_rank) p.system.b_rank = p.properties.b_rank;
  return p;
}

}  // namespace alsp
