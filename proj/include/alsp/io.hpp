/// @file io.hpp
/// @brief Matrix Market coordinate I/O and a plain vector file format.
///
/// Matrices use the header "%%MatrixMarket matrix coordinate real general"
/// with 1-based indices; values are written with 17 significant digits so a
/// write/read round trip reproduces doubles exactly.  Vector files hold the
/// length on the first line and one value per line after it.

#pragma once

#include <string>
#include <vector>

#include "alsp/sparse.hpp"

namespace alsp {

/// Throws std::runtime_error on malformed headers, out-of-range indices, or
/// duplicate entries; messages include the offending line number.
SparseMatrix read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const SparseMatrix& a);

std::vector<double> read_vector_file(const std::string& path);
void write_vector_file(const std::string& path,
                       const std::vector<double>& v);

}  // namespace alsp
