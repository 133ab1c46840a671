#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "lanczos/errors.hpp"
#include "lanczos/vector.hpp"

namespace lanczos {

/// One stored entry of a sparse matrix, 0-based.
struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Row-major n*n storage.
struct DenseStorage {
  std::vector<double> values;
};

/// Compressed sparse row storage. Entries within a row are kept in ascending
/// column order; matvec accumulates them in that order.
struct CsrStorage {
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
};

/// Square real matrix, dense or CSR, supporting A*v and A^T*v.
///
/// Immutable after construction. The CSR transpose product scatters over
/// rows; no transposed copy is ever stored.
class LinearOperator {
 public:
  static LinearOperator dense(std::size_t n, std::vector<double> row_major) {
    if (row_major.size() != n * n) {
      throw DimensionError("dense operator: expected " + std::to_string(n * n) + " entries, got " +
                           std::to_string(row_major.size()));
    }
    return LinearOperator(n, DenseStorage{std::move(row_major)});
  }

  static LinearOperator identity(std::size_t n) {
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    return dense(n, std::move(v));
  }

  /// Validates monotone row pointers, final pointer == nnz and column bounds.
  static LinearOperator csr(std::size_t n, std::vector<std::size_t> row_ptr,
                            std::vector<std::size_t> col_idx, std::vector<double> values) {
    if (row_ptr.size() != n + 1) throw DimensionError("csr operator: row_ptr must have n+1 entries");
    if (col_idx.size() != values.size()) {
      throw DimensionError("csr operator: col_idx and values differ in length");
    }
    if (row_ptr.front() != 0) throw UsageError("csr operator: row_ptr[0] must be 0");
    for (std::size_t i = 0; i < n; ++i) {
      if (row_ptr[i + 1] < row_ptr[i]) throw UsageError("csr operator: row_ptr not monotone");
    }
    if (row_ptr.back() != values.size()) throw UsageError("csr operator: row_ptr[n] != nnz");
    for (auto c : col_idx) {
      if (c >= n) throw UsageError("csr operator: column index out of range");
    }
    return LinearOperator(n, CsrStorage{std::move(row_ptr), std::move(col_idx), std::move(values)});
  }

  /// Builds CSR from unordered triplets; duplicates are summed in input order.
  static LinearOperator from_triplets(std::size_t n, std::vector<Triplet> entries) {
    for (const auto& t : entries) {
      if (t.row >= n || t.col >= n) throw UsageError("triplet index out of range");
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    std::vector<std::size_t> row_ptr(n + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& t = entries[i];
      if (i > 0 && entries[i - 1].row == t.row && entries[i - 1].col == t.col) {
        vals.back() += t.value;
        continue;
      }
      cols.push_back(t.col);
      vals.push_back(t.value);
      ++row_ptr[t.row + 1];
    }
    for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
    return csr(n, std::move(row_ptr), std::move(cols), std::move(vals));
  }

  std::size_t dim() const noexcept { return n_; }
  bool is_sparse() const noexcept { return std::holds_alternative<CsrStorage>(storage_); }

  /// Number of stored entries (n*n for dense).
  std::size_t nnz() const noexcept {
    if (auto* s = std::get_if<CsrStorage>(&storage_)) return s->values.size();
    return n_ * n_;
  }

  const CsrStorage* csr_storage() const noexcept { return std::get_if<CsrStorage>(&storage_); }
  const DenseStorage* dense_storage() const noexcept { return std::get_if<DenseStorage>(&storage_); }

  void matvec(std::span<const double> v, std::span<double> out) const {
    detail::require_same_size(v.size(), n_, "matvec");
    detail::require_same_size(out.size(), n_, "matvec");
    if (auto* s = std::get_if<CsrStorage>(&storage_)) {
      for (std::size_t i = 0; i < n_; ++i) {
        double sum = 0.0;
        for (std::size_t p = s->row_ptr[i]; p < s->row_ptr[i + 1]; ++p) sum += s->values[p] * v[s->col_idx[p]];
        out[i] = sum;
      }
      return;
    }
    const auto& a = std::get<DenseStorage>(storage_).values;
    for (std::size_t i = 0; i < n_; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n_; ++j) sum += a[i * n_ + j] * v[j];
      out[i] = sum;
    }
  }

  void transpose_matvec(std::span<const double> v, std::span<double> out) const {
    detail::require_same_size(v.size(), n_, "transpose_matvec");
    detail::require_same_size(out.size(), n_, "transpose_matvec");
    std::fill(out.begin(), out.end(), 0.0);
    if (auto* s = std::get_if<CsrStorage>(&storage_)) {
      for (std::size_t i = 0; i < n_; ++i) {
        const double vi = v[i];
        for (std::size_t p = s->row_ptr[i]; p < s->row_ptr[i + 1]; ++p) out[s->col_idx[p]] += s->values[p] * vi;
      }
      return;
    }
    const auto& a = std::get<DenseStorage>(storage_).values;
    for (std::size_t i = 0; i < n_; ++i) {
      const double vi = v[i];
      for (std::size_t j = 0; j < n_; ++j) out[j] += a[i * n_ + j] * vi;
    }
  }

  Vector matvec(const Vector& v) const {
    Vector out(n_);
    matvec(v.span(), out.span());
    return out;
  }

  Vector transpose_matvec(const Vector& v) const {
    Vector out(n_);
    transpose_matvec(v.span(), out.span());
    return out;
  }

  double frobenius_norm() const {
    double sum = 0.0;
    if (auto* s = std::get_if<CsrStorage>(&storage_)) {
      for (double x : s->values) sum += x * x;
    } else {
      for (double x : std::get<DenseStorage>(storage_).values) sum += x * x;
    }
    return std::sqrt(sum);
  }

  /// Row-major dense copy; duplicates cannot occur since CSR rows are canonical.
  std::vector<double> to_dense() const {
    if (auto* d = std::get_if<DenseStorage>(&storage_)) return d->values;
    const auto& s = std::get<CsrStorage>(storage_);
    std::vector<double> out(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p) out[i * n_ + s.col_idx[p]] += s.values[p];
    }
    return out;
  }

  /// CSR copy keeping only nonzero entries.
  LinearOperator to_csr() const {
    if (is_sparse()) return *this;
    const auto& a = std::get<DenseStorage>(storage_).values;
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (a[i * n_ + j] != 0.0) t.push_back({i, j, a[i * n_ + j]});
      }
    }
    return from_triplets(n_, std::move(t));
  }

 private:
  LinearOperator(std::size_t n, std::variant<DenseStorage, CsrStorage> storage)
      : n_(n), storage_(std::move(storage)) {}

  std::size_t n_ = 0;
  std::variant<DenseStorage, CsrStorage> storage_;
};

inline Vector matvec(const LinearOperator& a, const Vector& v) { return a.matvec(v); }
inline Vector transpose_matvec(const LinearOperator& a, const Vector& v) { return a.transpose_matvec(v); }

}  // namespace lanczos
