#include "otsm/mat_io.hpp"

#include "otsm/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace otsm {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_matrix(std::ostream& os, const Matrix& m) {
  os << "OTSM-MAT 1 " << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is) {
  std::string magic;
  int version = 0;
  Eigen::Index rows = -1;
  Eigen::Index cols = -1;
  if (!(is >> magic >> version >> rows >> cols) || magic != "OTSM-MAT" || version != 1 ||
      rows < 0 || cols < 0) {
    throw InvalidInput("read_matrix: missing or malformed OTSM-MAT header");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::string tok;
      if (!(is >> tok)) throw InvalidInput("read_matrix: truncated matrix body");
      try {
        std::size_t used = 0;
        m(i, j) = std::stod(tok, &used);
        if (used != tok.size()) throw InvalidInput("read_matrix: bad number '" + tok + "'");
      } catch (const std::logic_error&) {
        throw InvalidInput("read_matrix: bad number '" + tok + "'");
      }
    }
  }
  return m;
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path.string() + " for writing");
  write_matrix(os, m);
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open " + path.string());
  return read_matrix(is);
}

}  // namespace otsm
