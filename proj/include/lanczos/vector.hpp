#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lanczos/errors.hpp"

namespace lanczos {

/// Dense real vector of fixed length.
///
/// The length is set at construction; there is no push_back/resize. Copy and
/// move assignment replace the whole value, including the length.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double value = 0.0) : data_(n, value) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  static Vector ones(std::size_t n) { return Vector(n, 1.0); }

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  const std::vector<double>& values() const noexcept { return data_; }

  void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> data_;
};

namespace detail {

inline void require_same_size(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": length mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

}  // namespace detail

inline double dot(std::span<const double> u, std::span<const double> v) {
  detail::require_same_size(u.size(), v.size(), "dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * v[i];
  return sum;
}

inline double dot(const Vector& u, const Vector& v) { return dot(u.span(), v.span()); }

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }
inline double norm2(const Vector& v) { return norm2(v.span()); }

/// a*x + y
inline Vector axpy(double a, const Vector& x, const Vector& y) {
  detail::require_same_size(x.size(), y.size(), "axpy");
  Vector out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = a * x[i] + y[i];
  return out;
}

/// y <- a*x + y
inline void axpy_inplace(double a, const Vector& x, Vector& y) {
  detail::require_same_size(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline Vector subtract(const Vector& u, const Vector& v) {
  detail::require_same_size(u.size(), v.size(), "subtract");
  Vector out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - v[i];
  return out;
}

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}
inline bool all_finite(const Vector& v) { return all_finite(v.span()); }

}  // namespace lanczos
