#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lanczos/errors.hpp"
#include "lanczos/linear_operator.hpp"
#include "lanczos/vector.hpp"

namespace lanczos {

/// Block-tridiagonal convection-diffusion test matrix parameters.
///
/// Diagonal blocks are tridiagonal with 4 on the diagonal, alpha = -1 + delta
/// above and beta = -1 - delta below; off-diagonal blocks are -I.
struct ProblemSpec {
  std::size_t n = 10;
  double delta = 0.0;
  std::size_t block_size = 10;

  double alpha() const noexcept { return -1.0 + delta; }
  double beta() const noexcept { return -1.0 - delta; }

  void validate() const {
    if (block_size == 0) throw UsageError("block size must be positive");
    if (n == 0 || n % block_size != 0) {
      throw UsageError("n must be a positive multiple of " + std::to_string(block_size) + ", got " +
                       std::to_string(n));
    }
  }
};

struct Problem {
  LinearOperator a;
  Vector rhs;
  Vector exact_solution;
};

/// Assembles the test operator in CSR. The structure does not depend on
/// delta: entries are stored even when alpha or beta happens to be zero.
inline Problem generate_problem(const ProblemSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const std::size_t bs = spec.block_size;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  row_ptr.reserve(n + 1);
  cols.reserve(5 * n);
  vals.reserve(5 * n);
  auto push = [&](std::size_t c, double v) {
    cols.push_back(c);
    vals.push_back(v);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t local = i % bs;
    if (i >= bs) push(i - bs, -1.0);
    if (local > 0) push(i - 1, spec.beta());
    push(i, 4.0);
    if (local + 1 < bs) push(i + 1, spec.alpha());
    if (i + bs < n) push(i + bs, -1.0);
    row_ptr.push_back(cols.size());
  }
  auto a = LinearOperator::csr(n, std::move(row_ptr), std::move(cols), std::move(vals));
  Vector ones = Vector::ones(n);
  Vector rhs = a.matvec(ones);
  return Problem{std::move(a), std::move(rhs), std::move(ones)};
}

// ---------------------------------------------------------------------------
// Matrix Market
// ---------------------------------------------------------------------------

namespace detail {

struct MmHeader {
  bool coordinate = true;
  bool symmetric = false;
};

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline MmHeader parse_mm_header(const std::string& line) {
  std::istringstream in(line);
  std::string banner, object, format, field, symmetry;
  in >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw FormatError(1, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw FormatError(1, "unsupported object '" + object + "'");
  MmHeader h;
  if (format == "coordinate") {
    h.coordinate = true;
  } else if (format == "array") {
    h.coordinate = false;
  } else {
    throw FormatError(1, "unsupported format '" + format + "'");
  }
  if (field != "real" && field != "integer" && field != "double") {
    throw FormatError(1, "unsupported field '" + field + "'");
  }
  if (symmetry == "general") {
    h.symmetric = false;
  } else if (symmetry == "symmetric") {
    h.symmetric = true;
  } else {
    throw FormatError(1, "unsupported symmetry '" + symmetry + "'");
  }
  return h;
}

/// Reads the next non-comment, non-blank line; returns false at EOF.
inline bool next_data_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

struct MmContents {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Triplet> entries;
};

inline MmContents read_mm(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw FormatError(1, "empty file");
  ++line_no;
  const MmHeader h = parse_mm_header(line);
  if (!next_data_line(in, line, line_no)) throw FormatError(line_no, "missing size line");

  MmContents out;
  std::istringstream size_line(line);
  std::size_t nnz = 0;
  if (h.coordinate) {
    if (!(size_line >> out.rows >> out.cols >> nnz)) throw FormatError(line_no, "bad size line");
  } else {
    if (!(size_line >> out.rows >> out.cols)) throw FormatError(line_no, "bad size line");
    nnz = h.symmetric ? out.cols * (out.cols + 1) / 2 : out.rows * out.cols;
  }
  if (h.symmetric && out.rows != out.cols) throw FormatError(line_no, "symmetric matrix must be square");

  out.entries.reserve(h.symmetric ? 2 * nnz : nnz);
  std::size_t array_row = 0, array_col = 0;
  for (std::size_t e = 0; e < nnz; ++e) {
    if (!next_data_line(in, line, line_no)) {
      throw FormatError(line_no, "expected " + std::to_string(nnz) + " entries, got " + std::to_string(e));
    }
    std::istringstream entry(line);
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (h.coordinate) {
      if (!(entry >> i >> j >> v)) throw FormatError(line_no, "bad entry");
      if (i < 1 || j < 1 || i > out.rows || j > out.cols) throw FormatError(line_no, "index out of range");
      --i;
      --j;
    } else {
      if (!(entry >> v)) throw FormatError(line_no, "bad entry");
      // column-major; symmetric arrays list the lower triangle only
      i = array_row;
      j = array_col;
      ++array_row;
      if (array_row == out.rows) {
        ++array_col;
        array_row = h.symmetric ? array_col : 0;
      }
    }
    if (h.symmetric && i < j) throw FormatError(line_no, "symmetric storage must be lower triangular");
    out.entries.push_back({i, j, v});
    if (h.symmetric && i != j) out.entries.push_back({j, i, v});
  }
  return out;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace detail

/// Square real Matrix Market matrix (coordinate or array, general or
/// symmetric) as CSR. Duplicate coordinates are summed; symmetric storage is
/// expanded to both triangles.
inline LinearOperator read_matrix_market(std::istream& in) {
  auto mm = detail::read_mm(in);
  if (mm.rows != mm.cols) {
    throw UsageError("matrix is not square (" + std::to_string(mm.rows) + "x" + std::to_string(mm.cols) + ")");
  }
  return LinearOperator::from_triplets(mm.rows, std::move(mm.entries));
}

inline LinearOperator load_matrix_market(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_matrix_market(in);
}

/// Vector stored as an n x 1 Matrix Market matrix (array or coordinate).
inline Vector read_vector(std::istream& in) {
  auto mm = detail::read_mm(in);
  if (mm.cols != 1) throw UsageError("vector file must have exactly one column");
  Vector v(mm.rows);
  for (const auto& t : mm.entries) v[t.row] += t.value;
  return v;
}

inline Vector load_vector(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_vector(in);
}

/// Coordinate/general form with round-trip (17 significant digit) values.
inline void write_matrix_market(const LinearOperator& a, std::ostream& out) {
  const LinearOperator csr = a.to_csr();
  const auto& s = *csr.csr_storage();
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.dim() << ' ' << a.dim() << ' ' << s.values.size() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p) {
      std::snprintf(buf, sizeof buf, "%.17g", s.values[p]);
      out << i + 1 << ' ' << s.col_idx[p] + 1 << ' ' << buf << '\n';
    }
  }
}

inline void write_vector(const Vector& v, std::ostream& out) {
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  char buf[64];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf << '\n';
  }
}

}  // namespace lanczos
