// Matrix Market exchange format, real field only.  Coordinate files load
// into CSR operators (duplicate entries summed), array files into dense
// operators.  Indices are 1-based on the wire.

#ifndef GSVD_MATRIX_MARKET_HPP
#define GSVD_MATRIX_MARKET_HPP

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gsvd/operator.hpp"

namespace gsvd {

struct mm_parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void mm_fail(const std::string& path, std::size_t line,
                                 const std::string& what) {
  throw mm_parse_error(path + ":" + std::to_string(line) + ": " + what);
}

inline bool mm_next_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t pos = line.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos) continue;
    if (line[pos] == '%' && lineno > 1) continue;  // comment
    return true;
  }
  return false;
}

}  // namespace detail

inline OperatorPtr read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mm_parse_error(path + ": cannot open file");

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) detail::mm_fail(path, 1, "empty file");
  ++lineno;

  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") detail::mm_fail(path, 1, "missing %%MatrixMarket banner");
  if (object != "matrix") detail::mm_fail(path, 1, "unsupported object '" + object + "'");
  if (format != "coordinate" && format != "array")
    detail::mm_fail(path, 1, "unsupported format '" + format + "'");
  if (field != "real" && field != "integer")
    detail::mm_fail(path, 1, "unsupported field '" + field + "' (real required)");
  if (symmetry != "general")
    detail::mm_fail(path, 1, "unsupported symmetry '" + symmetry + "' (general required)");

  if (!detail::mm_next_line(in, line, lineno)) detail::mm_fail(path, lineno, "missing size line");

  if (format == "coordinate") {
    std::istringstream sz(line);
    long long rows = -1, cols = -1, nnz = -1;
    if (!(sz >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
      detail::mm_fail(path, lineno, "bad size line");
    std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
    entries.reserve(std::size_t(nnz));
    for (long long e = 0; e < nnz; ++e) {
      if (!detail::mm_next_line(in, line, lineno))
        detail::mm_fail(path, lineno, "unexpected end of file (entry " + std::to_string(e + 1) +
                                          " of " + std::to_string(nnz) + ")");
      std::istringstream row(line);
      long long i = 0, j = 0;
      double v = 0.0;
      if (!(row >> i >> j >> v)) detail::mm_fail(path, lineno, "bad coordinate entry");
      if (i < 1 || i > rows || j < 1 || j > cols)
        detail::mm_fail(path, lineno, "index out of range");
      entries.emplace_back(std::size_t(i - 1), std::size_t(j - 1), v);
    }
    return std::make_shared<CsrOperator>(std::size_t(rows), std::size_t(cols),
                                         std::move(entries));
  }

  // array format: column-major dense values
  std::istringstream sz(line);
  long long rows = -1, cols = -1;
  if (!(sz >> rows >> cols) || rows < 0 || cols < 0)
    detail::mm_fail(path, lineno, "bad size line");
  Matrix a{std::size_t(rows), std::size_t(cols)};
  for (long long j = 0; j < cols; ++j)
    for (long long i = 0; i < rows; ++i) {
      if (!detail::mm_next_line(in, line, lineno))
        detail::mm_fail(path, lineno, "unexpected end of file in array data");
      std::istringstream val(line);
      double v = 0.0;
      if (!(val >> v)) detail::mm_fail(path, lineno, "bad array value");
      a(std::size_t(i), std::size_t(j)) = v;
    }
  return std::make_shared<DenseOperator>(std::move(a));
}

inline void write_matrix_market(const std::string& path, const LinearOperator& op) {
  std::ofstream out(path);
  if (!out) throw mm_parse_error(path + ": cannot open file for writing");
  char buf[64];

  if (const auto* csr = dynamic_cast<const CsrOperator*>(&op)) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    auto entries = csr->entries();
    out << csr->rows() << " " << csr->cols() << " " << entries.size() << "\n";
    for (const auto& [i, j, v] : entries) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << (i + 1) << " " << (j + 1) << " " << buf << "\n";
    }
    return;
  }
  if (const auto* diag = dynamic_cast<const DiagonalOperator*>(&op)) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    const Vector& d = diag->diagonal();
    std::size_t nnz = 0;
    for (double v : d) nnz += v != 0.0;
    out << diag->rows() << " " << diag->cols() << " " << nnz << "\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", d[i]);
      out << (i + 1) << " " << (i + 1) << " " << buf << "\n";
    }
    return;
  }

  // anything else is written densely
  Matrix a = dynamic_cast<const DenseOperator*>(&op)
                 ? static_cast<const DenseOperator&>(op).matrix()
                 : densify(op);
  out << "%%MatrixMarket matrix array real general\n";
  out << a.rows() << " " << a.cols() << "\n";
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
      out << buf << "\n";
    }
}

// Plain text vectors, one value per line (regularization data files).
inline void write_vector(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  if (!out) throw mm_parse_error(path + ": cannot open file for writing");
  char buf[64];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf << "\n";
  }
}

inline Vector read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mm_parse_error(path + ": cannot open file");
  Vector v;
  double x;
  while (in >> x) v.push_back(x);
  return v;
}

}  // namespace gsvd

#endif  // GSVD_MATRIX_MARKET_HPP
