#pragma once

// Brute-force ground truth for the Lanczos-type solvers.
//
// Everything here goes through the moment definition c_i = (y, A^i r0) and a
// dense solve of the orthogonality system, never through a recurrence. Meant
// for desk-scale instances (k <= 12, n <= 64); the Hankel systems become
// hopelessly ill-conditioned beyond that.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lanczos/errors.hpp"
#include "lanczos/linear_operator.hpp"
#include "lanczos/vector.hpp"

namespace lanczos {

/// Pivot floor relative to the largest entry; below it a solve is singular.
inline constexpr double kSingularPivotRatio = 1e-13;

/// c_0 ... c_m of the functional c(x^i) = (y, A^i r0).
struct MomentSequence {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  /// Largest available moment index m.
  std::size_t max_index() const noexcept { return values.empty() ? 0 : values.size() - 1; }
  double operator[](std::size_t i) const { return values.at(i); }
  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

/// P_k(x) = 1 + beta_1 x + ... + beta_k x^k in the monomial basis.
///
/// coeffs()[0] is the constant term and is always exactly 1.
class PolynomialCoefficients {
 public:
  PolynomialCoefficients() : coeffs_{1.0} {}
  explicit PolynomialCoefficients(const std::vector<double>& beta) : coeffs_(beta.size() + 1) {
    coeffs_[0] = 1.0;
    std::copy(beta.begin(), beta.end(), coeffs_.begin() + 1);
  }

  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  /// beta_j for j in [1, degree]; beta(0) is the constant term.
  double beta(std::size_t j) const { return coeffs_.at(j); }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

namespace detail {

/// LU with partial pivoting of a small dense row-major matrix.
class DenseLu {
 public:
  DenseLu(std::vector<double> a, std::size_t k) : lu_(std::move(a)), perm_(k), k_(k) {
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    double largest = 0.0;
    for (double v : lu_) largest = std::max(largest, std::abs(v));
    min_pivot_ratio_ = largest > 0.0 ? 1.0 : 0.0;
    for (std::size_t col = 0; col < k_; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < k_; ++r) {
        if (std::abs(at(r, col)) > std::abs(at(piv, col))) piv = r;
      }
      if (piv != col) {
        for (std::size_t j = 0; j < k_; ++j) std::swap(at(piv, j), at(col, j));
        std::swap(perm_[piv], perm_[col]);
        sign_ = -sign_;
      }
      const double p = at(col, col);
      if (largest > 0.0) min_pivot_ratio_ = std::min(min_pivot_ratio_, std::abs(p) / largest);
      if (p == 0.0) {
        exactly_singular_ = true;
        continue;
      }
      for (std::size_t r = col + 1; r < k_; ++r) {
        const double m = at(r, col) / p;
        at(r, col) = m;
        for (std::size_t j = col + 1; j < k_; ++j) at(r, j) -= m * at(col, j);
      }
    }
  }

  bool singular(double ratio = kSingularPivotRatio) const {
    return exactly_singular_ || min_pivot_ratio_ < ratio;
  }
  double min_pivot_ratio() const noexcept { return min_pivot_ratio_; }

  double determinant() const {
    if (exactly_singular_) return 0.0;
    double d = sign_;
    for (std::size_t i = 0; i < k_; ++i) d *= at(i, i);
    return d;
  }

  std::vector<double> solve(const std::vector<double>& rhs) const {
    std::vector<double> x(k_);
    for (std::size_t i = 0; i < k_; ++i) x[i] = rhs[perm_[i]];
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = 0; j < i; ++j) x[i] -= at(i, j) * x[j];
    }
    for (std::size_t i = k_; i-- > 0;) {
      for (std::size_t j = i + 1; j < k_; ++j) x[i] -= at(i, j) * x[j];
      x[i] /= at(i, i);
    }
    return x;
  }

 private:
  double& at(std::size_t r, std::size_t c) { return lu_[r * k_ + c]; }
  double at(std::size_t r, std::size_t c) const { return lu_[r * k_ + c]; }

  std::vector<double> lu_;
  std::vector<std::size_t> perm_;
  std::size_t k_;
  double sign_ = 1.0;
  double min_pivot_ratio_ = 1.0;
  bool exactly_singular_ = false;
};

inline void require_moments(const MomentSequence& c, std::size_t needed, const char* op) {
  if (c.size() <= needed) {
    throw UsageError(std::string(op) + ": needs moments up to c_" + std::to_string(needed) + ", have " +
                     std::to_string(c.size()) + " values");
  }
}

}  // namespace detail

/// c_i = (y, A^i r0) for i = 0..m via a running vector w <- A w.
inline MomentSequence moments(const LinearOperator& a, const Vector& y, const Vector& r0, std::size_t m) {
  detail::require_same_size(y.size(), a.dim(), "moments");
  detail::require_same_size(r0.size(), a.dim(), "moments");
  MomentSequence c;
  c.values.reserve(m + 1);
  Vector w = r0;
  Vector next(a.dim());
  for (std::size_t i = 0; i <= m; ++i) {
    const double ci = dot(y, w);
    if (!std::isfinite(ci)) throw OverflowError("moments: c_" + std::to_string(i) + " is not finite");
    c.values.push_back(ci);
    if (i == m) break;
    a.matvec(w.span(), next.span());
    std::swap(w, next);
  }
  return c;
}

/// k*k Hankel matrix with entry (i, j) = c_{i+j+1}, row-major.
inline std::vector<double> hankel_matrix(const MomentSequence& c, std::size_t k) {
  detail::require_moments(c, 2 * k - 1, "hankel_matrix");
  std::vector<double> h(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) h[i * k + j] = c[i + j + 1];
  }
  return h;
}

/// det [c_{i+j+1}]_{i,j<k}; 0.0 when elimination hits an exactly zero pivot.
inline double hankel_det(const MomentSequence& c, std::size_t k) {
  if (k == 0) throw UsageError("hankel_det: k must be >= 1");
  return detail::DenseLu(hankel_matrix(c, k), k).determinant();
}

/// Smallest |pivot| / max|entry| seen while factoring the k*k Hankel matrix.
inline double hankel_pivot_ratio(const MomentSequence& c, std::size_t k) {
  if (k == 0) return 1.0;
  return detail::DenseLu(hankel_matrix(c, k), k).min_pivot_ratio();
}

/// 1-norm condition number of the symmetrically diagonal-scaled Hankel
/// matrix D H D with D = diag(|H_ii|^{-1/2}); infinity when singular.
inline double hankel_condition(const MomentSequence& c, std::size_t k) {
  if (k == 0) return 1.0;
  auto h = hankel_matrix(c, k);
  std::vector<double> d(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double hii = std::abs(h[i * k + i]);
    if (hii == 0.0) return std::numeric_limits<double>::infinity();
    d[i] = 1.0 / std::sqrt(hii);
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) h[i * k + j] *= d[i] * d[j];
  }
  auto col_sum_max = [k](const std::vector<double>& m) {
    double best = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += std::abs(m[i * k + j]);
      best = std::max(best, s);
    }
    return best;
  };
  const double norm_h = col_sum_max(h);
  detail::DenseLu lu(h, k);
  if (lu.singular(0.0)) return std::numeric_limits<double>::infinity();
  std::vector<double> inv(k * k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> e(k, 0.0);
    e[j] = 1.0;
    auto col = lu.solve(e);
    for (std::size_t i = 0; i < k; ++i) inv[i * k + j] = col[i];
  }
  return norm_h * col_sum_max(inv);
}

/// Solves sum_j beta_j c_{i+j} = -c_i (i = 0..k-1) for the FOP P_k.
///
/// Throws BreakdownDetected(k) when the Hankel system is numerically singular.
inline PolynomialCoefficients fop_coefficients(const MomentSequence& c, std::size_t k) {
  if (k == 0) return PolynomialCoefficients{};
  detail::DenseLu lu(hankel_matrix(c, k), k);
  if (lu.singular()) throw BreakdownDetected(k, "hankel");
  std::vector<double> rhs(k);
  for (std::size_t i = 0; i < k; ++i) rhs[i] = -c[i];
  auto beta = lu.solve(rhs);
  for (double b : beta) {
    if (!std::isfinite(b)) throw BreakdownDetected(k, "hankel");
  }
  return PolynomialCoefficients(beta);
}

/// c(p) = sum_i p_i c_i for a polynomial given by monomial coefficients.
inline double apply_functional(const MomentSequence& c, const std::vector<double>& poly) {
  detail::require_moments(c, poly.empty() ? 0 : poly.size() - 1, "apply_functional");
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) s += poly[i] * c[i];
  return s;
}

/// Product of two polynomials in the monomial basis.
inline std::vector<double> poly_multiply(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.empty() || q.empty()) return {};
  std::vector<double> out(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
  }
  return out;
}

/// x^m * p
inline std::vector<double> poly_shift(const std::vector<double>& p, std::size_t m) {
  std::vector<double> out(m, 0.0);
  out.insert(out.end(), p.begin(), p.end());
  return out;
}

namespace detail {

template <typename Apply>
Vector apply_polynomial(const Vector& v, const PolynomialCoefficients& p, Apply&& apply) {
  Vector result = v;
  Vector w = v;
  Vector next(v.size());
  for (std::size_t j = 1; j <= p.degree(); ++j) {
    apply(w, next);
    std::swap(w, next);
    axpy_inplace(p.beta(j), w, result);
    if (!all_finite(result)) throw OverflowError("polynomial evaluation produced a non-finite value");
  }
  return result;
}

}  // namespace detail

/// P(A) r0 = r0 + sum_j beta_j A^j r0 by iterated matvec.
inline Vector oracle_residual(const LinearOperator& a, const Vector& r0, const PolynomialCoefficients& p) {
  detail::require_same_size(r0.size(), a.dim(), "oracle_residual");
  return detail::apply_polynomial(r0, p, [&](const Vector& in, Vector& out) { a.matvec(in.span(), out.span()); });
}

/// P(A^T) y, the left vector z_k associated with P_k.
inline Vector oracle_left_vector(const LinearOperator& a, const Vector& y, const PolynomialCoefficients& p) {
  detail::require_same_size(y.size(), a.dim(), "oracle_left_vector");
  return detail::apply_polynomial(
      y, p, [&](const Vector& in, Vector& out) { a.transpose_matvec(in.span(), out.span()); });
}

}  // namespace lanczos
