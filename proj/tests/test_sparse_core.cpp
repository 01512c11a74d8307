#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "alsp/dense.hpp"
#include "alsp/io.hpp"
#include "alsp/rng.hpp"
#include "alsp/saddle.hpp"
#include "alsp/sparse.hpp"
#include "test_helpers.hpp"

using namespace alsp;
using namespace testutil;

namespace {

std::filesystem::path temp_file(const std::string& stem) {
  return std::filesystem::temp_directory_path() /
         ("alsp_core_" + stem + "_" + std::to_string(::getpid()));
}

SparseMatrix random_sparse(std::size_t rows, std::size_t cols, double density,
                           Rng& rng) {
  std::vector<Triplet> trips;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (rng.unit() < density) trips.push_back({r, c, rng.uniform(-2, 2)});
  return from_triplets(rows, cols, std::move(trips));
}

}  // namespace

TEST_CASE("from_triplets sorts, validates, and rejects duplicates") {
  std::vector<Triplet> trips = {{1, 2, 3.0}, {0, 0, 1.0}, {1, 0, 2.0}};
  SparseMatrix a = from_triplets(2, 3, trips);
  a.validate();
  CHECK(a.nnz() == 3);
  CHECK(a.row_offsets == std::vector<std::size_t>{0, 1, 3});
  CHECK(a.col_indices == std::vector<std::size_t>{0, 0, 2});
  CHECK(a.values == std::vector<double>{1.0, 2.0, 3.0});

  trips.push_back({1, 2, -1.0});  // duplicate position
  CHECK_THROWS_AS(from_triplets(2, 3, trips), std::invalid_argument);
  CHECK_THROWS_AS(from_triplets(2, 3, {{2, 0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(from_triplets(2, 3, {{0, 3, 1.0}}), std::invalid_argument);
}

TEST_CASE("validate names broken CSR invariants") {
  SparseMatrix a = sparse_identity(3);
  a.validate();
  std::swap(a.col_indices[0], a.col_indices[1]);
  a.row_offsets = {0, 2, 2, 3};  // row 0 now holds duplicate-ordered columns
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);
}

TEST_CASE("spmv matches trivial and dense oracles") {
  SparseMatrix eye = sparse_identity(3);
  std::vector<double> x = {1, 2, 3}, y(3);
  spmv(eye, x, y);
  CHECK(y == x);

  // single unit column in R^2
  SparseMatrix b = from_triplets(2, 1, {{0, 0, 1.0}});
  std::vector<double> xs = {5}, ys(2);
  spmv(b, xs, ys);
  CHECK(ys == std::vector<double>{5, 0});

  Rng rng(7);
  SparseMatrix a = random_sparse(4, 4, 0.6, rng);
  const std::vector<double> ad = to_dense(a);
  std::vector<double> xr(4), yr(4);
  for (auto& v : xr) v = rng.uniform(-1, 1);
  spmv(a, xr, yr);
  const std::vector<double> oracle = dense_matvec(4, 4, ad, xr);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(std::abs(yr[i] - oracle[i]) <= 1e-14);
}

TEST_CASE("spmv_transpose matches dense transpose oracle") {
  SparseMatrix b = from_triplets(2, 1, {{0, 0, 1.0}});
  std::vector<double> x = {5, 7}, y(1);
  spmv_transpose(b, x, y);
  CHECK(y == std::vector<double>{5});

  Rng rng(11);
  SparseMatrix a = random_sparse(5, 3, 0.7, rng);
  const std::vector<double> ad = to_dense(a);
  std::vector<double> xr(5), yr(3);
  for (auto& v : xr) v = rng.uniform(-1, 1);
  spmv_transpose(a, xr, yr);
  const std::vector<double> oracle = dense_matvec_t(5, 3, ad, xr);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(yr[i] - oracle[i]) <= 1e-14);
}

TEST_CASE("spmv adjointness: <Ax, y> == <x, A^T y>") {
  Rng rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    SparseMatrix a = random_sparse(6, 4, 0.5, rng);
    std::vector<double> x(4), y(6), ax(6), aty(4);
    for (auto& v : x) v = rng.uniform(-1, 1);
    for (auto& v : y) v = rng.uniform(-1, 1);
    spmv(a, x, ax);
    spmv_transpose(a, y, aty);
    double lhs = 0, rhs = 0, scale = 0;
    for (std::size_t i = 0; i < 6; ++i) lhs += ax[i] * y[i];
    for (std::size_t i = 0; i < 4; ++i) rhs += x[i] * aty[i];
    for (std::size_t i = 0; i < 6; ++i) scale += std::abs(ax[i] * y[i]);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, scale));
  }
}

TEST_CASE("dense_lu: identity, permutation, singular, and residual bound") {
  DenseMatrix eye = dense_of(2, 2, {1, 0, 0, 1});
  const std::vector<double> b34 = {3, 4};
  CHECK(lu_solve(dense_lu(eye), b34) == b34);

  DenseMatrix flip = dense_of(2, 2, {0, 1, 1, 0});
  const std::vector<double> b12 = {1, 2};
  CHECK(lu_solve(dense_lu(flip), b12) == std::vector<double>{2, 1});

  // 2x+y=3, x+3y=5 has the hand solution (0.8, 1.4)
  DenseMatrix a = dense_of(2, 2, {2, 1, 1, 3});
  const std::vector<double> b35 = {3, 5};
  const std::vector<double> x = lu_solve(dense_lu(a), b35);
  CHECK(x[0] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(1.4).epsilon(1e-14));

  DenseMatrix sing = dense_of(2, 2, {1, 2, 2, 4});
  CHECK_THROWS_WITH_AS(dense_lu(sing),
                       doctest::Contains("pivot"), std::runtime_error);

  Rng rng(17);
  const std::size_t n = 10;
  DenseMatrix r(n, n);
  for (auto& v : r.values) v = rng.uniform(-1, 1);
  for (std::size_t i = 0; i < n; ++i) r.values[i * n + i] += 4.0;
  std::vector<double> b(n);
  for (auto& v : b) v = rng.uniform(-1, 1);
  const std::vector<double> xs = lu_solve(dense_lu(r), b);
  const std::vector<double> ax = dense_matvec(n, n, r.values, xs);
  double inf_a = 0, norm_x = 0, norm_b = 0, resid = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(r.values[i * n + j]);
    inf_a = std::max(inf_a, row);
    norm_x += xs[i] * xs[i];
    norm_b += b[i] * b[i];
    resid += (ax[i] - b[i]) * (ax[i] - b[i]);
  }
  CHECK(std::sqrt(resid) <=
        1e-10 * (inf_a * std::sqrt(norm_x) + std::sqrt(norm_b)));
}

TEST_CASE("QMode applies diagonals and rejects nonpositive entries") {
  CHECK_THROWS_AS(QMode::diagonal({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(QMode::diagonal({-1.0}), std::invalid_argument);

  QMode q = QMode::diagonal({4.0, 9.0});
  std::vector<double> y = {1, 2}, out(2), back(2);
  q.apply(y, out);
  CHECK(out == std::vector<double>{4, 18});
  q.apply_inverse(out, back);
  CHECK(back[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(back[1] == doctest::Approx(2.0).epsilon(1e-15));
  q.apply_inverse_sqrt(y, out);
  CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(q.quadratic(y) == doctest::Approx(4.0 + 9.0 * 4.0));
  CHECK(q.inverse_quadratic(y) == doctest::Approx(0.25 + 4.0 / 9.0));
}

TEST_CASE("weighted norms: hand values and norm axioms") {
  WeightedNorm e = WeightedNorm::euclidean();
  CHECK(e(std::vector<double>{3, 4}) == doctest::Approx(5.0));

  // q = diag(4): ||y||_{Q^{-1}} of (3) is sqrt(9/4) = 1.5 under q-weighting
  WeightedNorm qn = WeightedNorm::q_norm(QMode::diagonal({4.0}), 1);
  CHECK(qn(std::vector<double>{3}) == doctest::Approx(6.0));  // sqrt(9*4)

  // p_beta on (x, y) = (3, 4) with beta = 4, Q = I: sqrt(9 + 4*16)
  WeightedNorm pb = WeightedNorm::p_beta(4.0, QMode::identity(), 1, 1);
  CHECK(pb(std::vector<double>{3, 4}) == doctest::Approx(std::sqrt(73.0)));

  // beta = 1, Q = I reduces to the euclidean norm
  WeightedNorm pb1 = WeightedNorm::p_beta(1.0, QMode::identity(), 2, 2);
  Rng rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> v(4);
    for (auto& x : v) x = rng.uniform(-1, 1);
    CHECK(pb1(v) == doctest::Approx(e(v)).epsilon(1e-15));
  }

  // axioms: positivity, homogeneity, triangle inequality
  WeightedNorm pbq =
      WeightedNorm::p_beta(2.5, QMode::diagonal({0.5, 3.0}), 2, 2);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> u(4), v(4), sum(4);
    for (auto& x : u) x = rng.uniform(-1, 1);
    for (auto& x : v) x = rng.uniform(-1, 1);
    for (std::size_t i = 0; i < 4; ++i) sum[i] = u[i] + v[i];
    const double nu = pbq(u), nv = pbq(v), ns = pbq(sum);
    CHECK(nu > 0.0);
    std::vector<double> su(4);
    for (std::size_t i = 0; i < 4; ++i) su[i] = -2.5 * u[i];
    CHECK(pbq(su) == doctest::Approx(2.5 * nu).epsilon(1e-13));
    CHECK(ns <= nu + nv + 1e-13);
  }
  CHECK(pbq(std::vector<double>(4, 0.0)) == 0.0);
}

TEST_CASE("splitting identity M = A + N on random instances") {
  Rng rng(31);
  const std::size_t n = 6, m = 3;
  std::vector<double> gd(n * n), bd(n * m), f(n, 0.0), g(m, 0.0);
  for (auto& v : gd) v = rng.uniform(-1, 1);
  for (auto& v : bd) v = rng.uniform(-1, 1);
  SaddleSystem sys = make_system(n, m, gd, bd, f, g);
  sys.validate();

  QMode q = QMode::diagonal({0.5, 2.0, 1.5});
  const double omega = 0.7;
  ShiftedOperator mop(sys, omega, q);
  SplitOperator nop(sys, omega, q);

  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> z(n + m), mz(n + m), nz(n + m), az(n + m);
    for (auto& v : z) v = rng.uniform(-1, 1);
    mop.apply(z, mz);
    nop.apply(z, nz);
    apply_A(sys, z, az);
    for (std::size_t i = 0; i < n + m; ++i) {
      const double scale = std::max({1.0, std::abs(mz[i]), std::abs(az[i])});
      CHECK(std::abs(mz[i] - nz[i] - az[i]) <= 1e-14 * scale);
    }
    // N zeroes the x block and y = 0 kills it entirely
    for (std::size_t i = 0; i < n; ++i) CHECK(nz[i] == 0.0);
  }

  // 1x1 blocks, hand arithmetic: M z = (5, -2.5), N z = (0, 0.5)
  SaddleSystem tiny = make_system(1, 1, {2}, {3}, {0}, {0});
  ShiftedOperator mt(tiny, 0.5, QMode::identity());
  SplitOperator nt(tiny, 0.5, QMode::identity());
  std::vector<double> z = {1, 1}, out(2);
  mt.apply(z, out);
  CHECK(out == std::vector<double>{5.0, -2.5});
  nt.apply(z, out);
  CHECK(out == std::vector<double>{0.0, 0.5});
  apply_A(tiny, z, out);
  CHECK(out == std::vector<double>{5.0, -3.0});
}

TEST_CASE("dense_M / dense_N / dense_A assemble the operators") {
  Rng rng(37);
  const std::size_t n = 5, m = 2;
  std::vector<double> gd(n * n), bd(n * m);
  for (auto& v : gd) v = rng.uniform(-1, 1);
  for (auto& v : bd) v = rng.uniform(-1, 1);
  SaddleSystem sys = make_system(n, m, gd, bd, std::vector<double>(n, 0.0),
                                 std::vector<double>(m, 0.0));
  ALConfig cfg;
  cfg.omega = 0.3;
  cfg.q_mode = QMode::diagonal({2.0, 5.0});

  DenseMatrix md = dense_M(sys, cfg);
  DenseMatrix nd = dense_N(sys, cfg);
  DenseMatrix ad = dense_A(sys);
  ShiftedOperator mop(sys, cfg.omega, cfg.q_mode);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> z(n + m), mz(n + m);
    for (auto& v : z) v = rng.uniform(-1, 1);
    mop.apply(z, mz);
    const std::vector<double> oracle = dense_matvec(n + m, n + m, md.values, z);
    for (std::size_t i = 0; i < n + m; ++i)
      CHECK(mz[i] == doctest::Approx(oracle[i]).epsilon(1e-13));
  }
  for (std::size_t i = 0; i < (n + m) * (n + m); ++i)
    CHECK(md.values[i] - nd.values[i] == doctest::Approx(ad.values[i]));
}

TEST_CASE("matrix market and vector files round-trip") {
  const auto mat_path = temp_file("roundtrip.mtx");
  const auto vec_path = temp_file("roundtrip.vec");

  SparseMatrix one = from_triplets(1, 1, {{0, 0, 2.5}});
  write_matrix_market(mat_path.string(), one);
  SparseMatrix one_back = read_matrix_market(mat_path.string());
  CHECK(one_back.rows == 1);
  CHECK(one_back.values == std::vector<double>{2.5});

  SparseMatrix zero = from_triplets(3, 3, {});
  write_matrix_market(mat_path.string(), zero);
  SparseMatrix zero_back = read_matrix_market(mat_path.string());
  CHECK(zero_back.rows == 3);
  CHECK(zero_back.cols == 3);
  CHECK(zero_back.nnz() == 0);

  Rng rng(41);
  std::vector<Triplet> trips;
  for (int k = 0; k < 50; ++k) {
    const auto r = static_cast<std::size_t>(rng.unit() * 20);
    const auto c = static_cast<std::size_t>(rng.unit() * 10);
    trips.push_back({r, c, rng.uniform(-1e3, 1e3)});
  }
  std::sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  trips.erase(std::unique(trips.begin(), trips.end(),
                          [](const Triplet& a, const Triplet& b) {
                            return a.row == b.row && a.col == b.col;
                          }),
              trips.end());
  SparseMatrix big = from_triplets(20, 10, trips);
  write_matrix_market(mat_path.string(), big);
  SparseMatrix big_back = read_matrix_market(mat_path.string());
  CHECK(big_back.row_offsets == big.row_offsets);
  CHECK(big_back.col_indices == big.col_indices);
  CHECK(big_back.values == big.values);  // 17 digits round-trip exactly

  std::vector<double> v = {1.0, -2.5, 3.25e-7};
  write_vector_file(vec_path.string(), v);
  CHECK(read_vector_file(vec_path.string()) == v);

  std::filesystem::remove(mat_path);
  std::filesystem::remove(vec_path);
}

TEST_CASE("matrix market reader reports malformed input with line numbers") {
  const auto path = temp_file("bad.mtx");
  {
    std::ofstream out(path);
    out << "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 2\n";
  }
  CHECK_THROWS_AS(read_matrix_market(path.string()), std::runtime_error);
  {
    std::ofstream out(path);
    out << "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
  }
  CHECK_THROWS_WITH_AS(read_matrix_market(path.string()),
                       doctest::Contains(":3"), std::runtime_error);
  CHECK_THROWS_AS(read_matrix_market("/nonexistent/alsp.mtx"),
                  std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("rng is deterministic and uniform samples stay in range") {
  Rng a(99), b(99);
  for (int k = 0; k < 100; ++k) {
    const double u = a.unit();
    CHECK(u == b.unit());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng c(100);
  bool differs = false;
  Rng a2(99);
  for (int k = 0; k < 10; ++k) differs = differs || (a2.unit() != c.unit());
  CHECK(differs);
  for (int k = 0; k < 100; ++k) {
    const double v = c.uniform(-3.0, 5.0);
    CHECK(v >= -3.0);
    CHECK(v < 5.0);
  }
}

TEST_CASE("saddle system and config validation name the broken field") {
  SaddleSystem sys = toy3();
  sys.f.pop_back();
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);

  ALConfig cfg;
  cfg.omega = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.omega = 1.0;
  cfg.delta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.delta = 0.5;
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
