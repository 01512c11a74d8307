#include "alsp/io.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace alsp {

namespace {

constexpr const char* kHeader =
    "%%MatrixMarket matrix coordinate real general";

[[noreturn]] void fail(const std::string& path, std::size_t line,
                       const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) fail(path, 1, "empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    fail(path, lineno,
         "malformed header (expected \"" + std::string(kHeader) + "\")");

  // skip comment lines
  std::size_t rows = 0, cols = 0, nnz = 0;
  for (;;) {
    if (!std::getline(in, line)) fail(path, lineno, "missing size line");
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    std::istringstream ss(line);
    long long r, c, k;
    if (!(ss >> r >> c >> k) || r < 0 || c < 0 || k < 0)
      fail(path, lineno, "malformed size line");
    std::string rest;
    if (ss >> rest) fail(path, lineno, "trailing tokens on size line");
    rows = static_cast<std::size_t>(r);
    cols = static_cast<std::size_t>(c);
    nnz = static_cast<std::size_t>(k);
    break;
  }

  std::vector<Triplet> entries;
  entries.reserve(nnz);
  for (std::size_t e = 0; e < nnz; ++e) {
    if (!std::getline(in, line))
      fail(path, lineno, "unexpected end of file: expected " +
                             std::to_string(nnz) + " entries");
    ++lineno;
    std::istringstream ss(line);
    long long i, j;
    double v;
    if (!(ss >> i >> j >> v)) fail(path, lineno, "malformed entry line");
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows ||
        static_cast<std::size_t>(j) > cols)
      fail(path, lineno, "index out of range: (" + std::to_string(i) + "," +
                             std::to_string(j) + ")");
    entries.push_back(Triplet{static_cast<std::size_t>(i) - 1,
                              static_cast<std::size_t>(j) - 1, v});
  }

  try {
    return from_triplets(rows, cols, std::move(entries));
  } catch (const std::invalid_argument& err) {
    throw std::runtime_error(path + ": " + err.what());
  }
}

void write_matrix_market(const std::string& path, const SparseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << kHeader << "\n";
  out << a.rows << " " << a.cols << " " << a.nnz() << "\n";
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      out << (i + 1) << " " << (a.col_indices[k] + 1) << " "
          << format_value(a.values[k]) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<double> read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(path, 1, "empty file");
  std::size_t len = 0;
  {
    std::istringstream ss(line);
    long long k;
    if (!(ss >> k) || k < 0) fail(path, 1, "malformed length line");
    len = static_cast<std::size_t>(k);
  }
  std::vector<double> v;
  v.reserve(len);
  for (std::size_t e = 0; e < len; ++e) {
    if (!std::getline(in, line))
      fail(path, e + 1, "unexpected end of file: expected " +
                            std::to_string(len) + " values");
    std::istringstream ss(line);
    double x;
    if (!(ss >> x)) fail(path, e + 2, "malformed value line");
    v.push_back(x);
  }
  return v;
}

void write_vector_file(const std::string& path, const std::vector<double>& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << v.size() << "\n";
  for (double x : v) out << format_value(x) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace alsp
