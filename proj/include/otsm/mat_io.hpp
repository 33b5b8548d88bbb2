#pragma once

#include "otsm/block_types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace otsm {

// OTSM-MAT v1 text format:
//   OTSM-MAT 1 <rows> <cols>
//   row-major whitespace-separated decimals, 17 significant digits,
//   one matrix row per line.

void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);

void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

/// Round-tripping text for a double: 17 significant digits, "%.17g".
std::string format_double(double x);

}  // namespace otsm
