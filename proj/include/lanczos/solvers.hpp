#pragma once

// Lanczos-type solvers built on the three-term-pair recurrence
//
//   P_k(x) = A_k { (x^2 + B_k x + C_k) P_{k-2}(x) + (F_k x + G_k) P_{k-3}(x) }
//
// with P_k(0) = 1. Two coefficient schemes are provided:
//
//   * A12     auxiliary polynomials U_i = x^i; the inner products run against
//             the power sequence y_j = (A^T)^j y.
//   * A12new  auxiliary polynomials U_i = P_i; the inner products run against
//             left vectors z_k = P_k(A^T) y, updated by the same recurrence.
//
// Both are exposed as resumable state machines (init / coefficients / step)
// plus a driver that runs to convergence, breakdown, overflow or the
// iteration limit. No restarting or look-ahead is attempted on breakdown.

#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lanczos/errors.hpp"
#include "lanczos/linear_operator.hpp"
#include "lanczos/vector.hpp"

namespace lanczos {

/// Sign of B_k in A12new: Positive gives B_k = b3/(z_{k-1}, A r_{k-2}), which
/// reproduces the FOP; Negated flips it and is kept only for comparison runs.
enum class BkSign { Positive, Negated };

struct SolverConfig {
  double eps = 1.0e-5;
  /// Defaults to 10*n when unset.
  std::optional<std::size_t> max_iterations;
  double breakdown_threshold = 1e-13;
  bool true_residual_check = true;
  BkSign bk_sign = BkSign::Positive;

  std::size_t iteration_limit(std::size_t n) const { return max_iterations.value_or(10 * n); }

  void validate(std::size_t n) const {
    if (!(eps > 0.0)) throw UsageError("eps must be positive");
    if (iteration_limit(n) < 4) throw UsageError("max_iterations must be >= 4");
    if (!(breakdown_threshold > 0.0 && breakdown_threshold < 1e-6)) {
      throw UsageError("breakdown_threshold must lie in (0, 1e-6)");
    }
  }
};

/// Per-iteration scalars of the recurrence. D_k and E_k are identically zero
/// for this relation and are carried only to make that explicit.
struct RecurrenceCoefficients {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  double E = 0.0;
  double F = 0.0;
  double G = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double Delta = 0.0;
};

enum class Status { Converged, Breakdown, MaxIterations, Overflow, Drift };

struct ConvergenceReport {
  Status status = Status::MaxIterations;
  std::size_t iterations = 0;
  /// ||r_k|| of the recursive residual for k = 0..iterations.
  std::vector<double> residual_history;
  /// True residual ||b - A x|| when the check is enabled, else the recursive one.
  double final_residual = 0.0;
  double recursive_residual = 0.0;
  /// |true - recursive| exceeded 10*eps at termination.
  bool residual_drift = false;
  std::size_t breakdown_k = 0;
  std::string breakdown_denominator;
  double wall_time = 0.0;
  Vector solution;

  /// Short status text: converged, breakdown(name), overflow, max_iters, drift.
  std::string status_token() const {
    switch (status) {
      case Status::Converged: return "converged";
      case Status::Breakdown: return "breakdown(" + breakdown_denominator + ")";
      case Status::MaxIterations: return "max_iters";
      case Status::Overflow: return "overflow";
      case Status::Drift: return "drift";
    }
    return "unknown";
  }
};

/// Snapshot handed to an observer after each accepted iterate (k = 0, 1, ...).
/// `z` is null for A12; `coefficients` is null for the initialization iterates.
struct IterationView {
  std::size_t k;
  const Vector& r;
  const Vector& x;
  const Vector* z;
  const RecurrenceCoefficients* coefficients;
};

using IterationObserver = std::function<void(const IterationView&)>;

namespace detail {

/// Breakdown when |value| <= threshold * scale (so an exact zero always trips).
inline void check_denominator(double value, double scale, double threshold, std::size_t k, const char* name) {
  if (!std::isfinite(value) || !std::isfinite(scale)) {
    throw OverflowError(std::string("non-finite denominator ") + name + " at k=" + std::to_string(k));
  }
  if (!(std::abs(value) > threshold * scale)) throw BreakdownDetected(k, name);
}

inline void check_finite(std::initializer_list<double> values, std::size_t k) {
  for (double v : values) {
    if (!std::isfinite(v)) throw OverflowError("non-finite coefficient at k=" + std::to_string(k));
  }
}

inline void check_finite(const Vector& v, std::size_t k, const char* what) {
  if (!all_finite(v)) throw OverflowError(std::string("non-finite ") + what + " at k=" + std::to_string(k));
}

inline void notify(const IterationObserver& obs, std::size_t k, const Vector& r, const Vector& x, const Vector* z,
                   const RecurrenceCoefficients* c) {
  if (obs) obs(IterationView{k, r, x, z, c});
}

/// Shared bookkeeping of the two drivers.
class RunRecorder {
 public:
  RunRecorder(const LinearOperator& a, const Vector& b, const SolverConfig& cfg, IterationObserver user)
      : a_(a), b_(b), cfg_(cfg), user_(std::move(user)), start_(std::chrono::steady_clock::now()) {}

  /// Records ||r_k|| and keeps the latest accepted iterate.
  IterationObserver observer() {
    return [this](const IterationView& v) {
      report_.residual_history.push_back(norm2(v.r));
      last_k_ = v.k;
      last_x_ = v.x;
      if (user_) user_(v);
    };
  }

  double last_norm() const { return report_.residual_history.back(); }

  ConvergenceReport finish(Status status) {
    const Vector& x = last_x_;
    report_.status = status;
    report_.iterations = last_k_;
    report_.solution = x;
    report_.recursive_residual = report_.residual_history.empty() ? 0.0 : report_.residual_history.back();
    report_.final_residual = report_.recursive_residual;
    if (cfg_.true_residual_check && x.size() == b_.size() && all_finite(x)) {
      const double true_norm = norm2(subtract(b_, a_.matvec(x)));
      report_.residual_drift = std::abs(true_norm - report_.recursive_residual) > 10.0 * cfg_.eps;
      report_.final_residual = true_norm;
      if (status == Status::Converged && !(true_norm <= cfg_.eps)) report_.status = Status::Drift;
    }
    report_.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(report_);
  }

  ConvergenceReport finish_breakdown(const BreakdownDetected& e) {
    report_.breakdown_k = e.k();
    report_.breakdown_denominator = e.denominator();
    return finish(Status::Breakdown);
  }

 private:
  const LinearOperator& a_;
  const Vector& b_;
  const SolverConfig& cfg_;
  IterationObserver user_;
  std::chrono::steady_clock::time_point start_;
  ConvergenceReport report_;
  std::size_t last_k_ = 0;
  Vector last_x_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// A12new
// ---------------------------------------------------------------------------

/// Sliding window for A12new. Index 0 is the newest iterate k, 1 is k-1, 2 is k-2.
struct A12NewState {
  std::size_t k = 0;
  std::array<Vector, 3> r;
  std::array<Vector, 3> x;
  std::array<Vector, 3> z;
  /// A r_{k-3}, reused as A r_{k-4} by the next step.
  Vector a_r_lag;
  // scratch filled by a12new_coefficients and consumed by a12new_step
  Vector q1, q2, q3, s1, s2, s3;
};

/// Initialization of A12new: r_1..r_3, x_1..x_3, z_1..z_3 from the moments c_0..c_5.
///
/// Stops early (state.k < 3) as soon as ||r_j|| <= cfg.eps so trivially easy
/// systems never reach the Hankel determinants. Throws BreakdownDetected for a
/// vanishing c_1, delta or Delta.
inline A12NewState init_a12new(const LinearOperator& a, const Vector& b, const Vector& x0, const Vector& y,
                               const SolverConfig& cfg = {}, const IterationObserver& obs = {}) {
  const std::size_t n = a.dim();
  detail::require_same_size(b.size(), n, "init_a12new");
  detail::require_same_size(x0.size(), n, "init_a12new");
  detail::require_same_size(y.size(), n, "init_a12new");
  if (norm2(y) == 0.0) throw UsageError("y must be nonzero");
  const double tol = cfg.breakdown_threshold;

  A12NewState s;
  Vector r0 = subtract(b, a.matvec(x0));
  detail::check_finite(r0, 0, "r_0");
  s.r = {r0, Vector(n), Vector(n)};
  s.x = {x0, Vector(n), Vector(n)};
  s.z = {y, Vector(n), Vector(n)};
  s.k = 0;
  detail::notify(obs, 0, s.r[0], s.x[0], &s.z[0], nullptr);
  if (norm2(r0) <= cfg.eps) return s;

  const Vector p = a.matvec(r0);
  const Vector p1 = a.matvec(p);
  const Vector p2 = a.matvec(p1);
  const Vector p3 = a.matvec(p2);
  const Vector p4 = a.matvec(p3);
  const double c0 = dot(y, r0), c1 = dot(y, p), c2 = dot(y, p1), c3 = dot(y, p2), c4 = dot(y, p3),
               c5 = dot(y, p4);
  detail::check_finite({c0, c1, c2, c3, c4, c5}, 1);
  const Vector y1 = a.transpose_matvec(y);
  const Vector y2 = a.transpose_matvec(y1);
  const Vector y3 = a.transpose_matvec(y2);

  detail::check_denominator(c1, norm2(y) * norm2(p), tol, 1, "c1");
  const double w = c0 / c1;
  Vector r1(n), x1(n), z1(n);
  for (std::size_t i = 0; i < n; ++i) {
    r1[i] = r0[i] - w * p[i];
    x1[i] = x0[i] + w * r0[i];
    z1[i] = y[i] - w * y1[i];
  }
  detail::check_finite(r1, 1, "r_1");
  s.r = {r1, r0, Vector(n)};
  s.x = {x1, x0, Vector(n)};
  s.z = {z1, y, Vector(n)};
  s.k = 1;
  detail::notify(obs, 1, s.r[0], s.x[0], &s.z[0], nullptr);
  if (norm2(r1) <= cfg.eps) return s;

  const double delta = c1 * c3 - c2 * c2;
  detail::check_denominator(delta, std::abs(c1 * c3) + c2 * c2, tol, 2, "delta");
  const double alpha = (c0 * c3 - c1 * c2) / delta;
  const double beta = (c0 * c2 - c1 * c1) / delta;
  Vector r2(n), x2(n), z2(n);
  for (std::size_t i = 0; i < n; ++i) {
    r2[i] = r0[i] - alpha * p[i] + beta * p1[i];
    x2[i] = x0[i] + alpha * r0[i] - beta * p[i];
    z2[i] = y[i] - alpha * y1[i] + beta * y2[i];
  }
  detail::check_finite(r2, 2, "r_2");
  s.r = {r2, r1, r0};
  s.x = {x2, x1, x0};
  s.z = {z2, z1, y};
  s.k = 2;
  detail::notify(obs, 2, s.r[0], s.x[0], &s.z[0], nullptr);
  if (norm2(r2) <= cfg.eps) return s;

  // 3x3 Hankel determinant of c_1..c_5 and the cofactors giving P_3.
  const double m1 = c3 * c5 - c4 * c4, m2 = c2 * c5 - c3 * c4, m3 = c2 * c4 - c3 * c3;
  const double big_delta = c1 * m1 - c2 * m2 + c3 * m3;
  const double delta_scale = std::abs(c1) * (std::abs(c3 * c5) + c4 * c4) +
                             std::abs(c2) * (std::abs(c2 * c5) + std::abs(c3 * c4)) +
                             std::abs(c3) * (std::abs(c2 * c4) + c3 * c3);
  detail::check_denominator(big_delta, delta_scale, tol, 3, "Delta");
  const double alpha3 = (c0 * m1 - c2 * (c1 * c5 - c2 * c4) + c3 * (c1 * c4 - c3 * c2)) / big_delta;
  const double beta3 = (c0 * (c2 * c5 - c4 * c3) - c1 * (c1 * c5 - c2 * c4) + c3 * (c1 * c3 - c2 * c2)) / big_delta;
  const double gamma3 = (c0 * m3 - c1 * (c1 * c4 - c2 * c3) + c2 * (c1 * c3 - c2 * c2)) / big_delta;
  detail::check_finite({alpha3, beta3, gamma3}, 3);
  Vector r3(n), x3(n), z3(n);
  for (std::size_t i = 0; i < n; ++i) {
    r3[i] = r0[i] - alpha3 * p[i] + beta3 * p1[i] - gamma3 * p2[i];
    z3[i] = y[i] - alpha3 * y1[i] + beta3 * y2[i] - gamma3 * y3[i];
    x3[i] = x0[i] + alpha3 * r0[i] - beta3 * p[i] + gamma3 * p1[i];
  }
  detail::check_finite(r3, 3, "r_3");
  s.r = {r3, r2, r1};
  s.x = {x3, x2, x1};
  s.z = {z3, z2, z1};
  s.a_r_lag = p;  // A r_0 = A r_{k-3} for k = 3
  s.k = 3;
  detail::notify(obs, 3, s.r[0], s.x[0], &s.z[0], nullptr);
  return s;
}

/// Coefficients of iterate k = state.k + 1 (requires state.k >= 3).
///
/// Fills the scratch vectors q1 = A r_{k-2}, q2 = A q1, q3 = A r_{k-3},
/// s1 = A^T z_{k-2}, s2 = A^T s1, s3 = A^T z_{k-3} used by a12new_step.
inline RecurrenceCoefficients a12new_coefficients(A12NewState& s, const LinearOperator& a,
                                                  const SolverConfig& cfg = {}) {
  if (s.k < 3) throw UsageError("a12new_coefficients: state not initialized past k=3");
  const std::size_t k = s.k + 1;
  const double tol = cfg.breakdown_threshold;
  const Vector& r_km2 = s.r[1];
  const Vector& r_km3 = s.r[2];
  const Vector& z_km1 = s.z[0];
  const Vector& z_km2 = s.z[1];
  const Vector& z_km3 = s.z[2];
  const Vector& ar_km4 = s.a_r_lag;

  s.q1 = a.matvec(r_km2);
  s.q2 = a.matvec(s.q1);
  s.q3 = a.matvec(r_km3);
  s.s1 = a.transpose_matvec(z_km2);
  s.s2 = a.transpose_matvec(s.s1);
  s.s3 = a.transpose_matvec(z_km3);

  RecurrenceCoefficients c;
  const double den_f = dot(z_km3, ar_km4);
  detail::check_denominator(den_f, norm2(z_km3) * norm2(ar_km4), tol, k, "z[k-3].Ar[k-4]");
  c.F = -dot(s.s1, ar_km4) / den_f;

  c.b1 = -dot(s.s3, s.q1) - c.F * dot(z_km3, s.q3);
  c.b2 = -dot(s.s1, s.q1) - c.F * dot(z_km2, s.q3);
  c.b3 = -dot(z_km1, s.q2) - c.F * dot(z_km1, s.q3);

  const double den_b = dot(z_km1, s.q1);
  detail::check_denominator(den_b, norm2(z_km1) * norm2(s.q1), tol, k, "z[k-1].Ar[k-2]");
  c.B = (cfg.bk_sign == BkSign::Positive ? c.b3 : -c.b3) / den_b;

  const double den_g = dot(z_km3, r_km3);
  detail::check_denominator(den_g, norm2(z_km3) * norm2(r_km3), tol, k, "z[k-3].r[k-3]");
  c.G = (c.b1 - dot(z_km3, s.q1) * c.B) / den_g;

  const double den_c = dot(z_km2, r_km2);
  detail::check_denominator(den_c, norm2(z_km2) * norm2(r_km2), tol, k, "z[k-2].r[k-2]");
  c.C = (c.b2 - dot(z_km2, s.q1) * c.B) / den_c;

  c.Delta = -den_g * den_c * den_b;
  const double sum = c.C + c.G;
  detail::check_denominator(sum, std::abs(c.C) + std::abs(c.G), tol, k, "C_k+G_k");
  c.A = 1.0 / sum;
  detail::check_finite({c.A, c.B, c.C, c.F, c.G}, k);
  return c;
}

/// Applies the recurrence for r_k, x_k and z_k and rotates the window.
inline void a12new_step(A12NewState& s, const RecurrenceCoefficients& c) {
  const std::size_t n = s.r[0].size();
  const std::size_t k = s.k + 1;
  const Vector& r_km2 = s.r[1];
  const Vector& r_km3 = s.r[2];
  const Vector& x_km2 = s.x[1];
  const Vector& x_km3 = s.x[2];
  const Vector& z_km2 = s.z[1];
  const Vector& z_km3 = s.z[2];
  Vector rk(n), xk(n), zk(n);
  for (std::size_t i = 0; i < n; ++i) {
    rk[i] = c.A * (s.q2[i] + c.B * s.q1[i] + c.C * r_km2[i] + c.F * s.q3[i] + c.G * r_km3[i]);
    xk[i] = c.A * (c.C * x_km2[i] + c.G * x_km3[i] - (s.q1[i] + c.B * r_km2[i] + c.F * r_km3[i]));
    zk[i] = c.A * (s.s2[i] + c.B * s.s1[i] + c.C * z_km2[i] + c.F * s.s3[i] + c.G * z_km3[i]);
  }
  detail::check_finite(rk, k, "r_k");
  detail::check_finite(xk, k, "x_k");
  detail::check_finite(zk, k, "z_k");
  s.r = {std::move(rk), std::move(s.r[0]), std::move(s.r[1])};
  s.x = {std::move(xk), std::move(s.x[0]), std::move(s.x[1])};
  s.z = {std::move(zk), std::move(s.z[0]), std::move(s.z[1])};
  s.a_r_lag = std::move(s.q3);  // A r_{k-3}
  s.q3 = Vector();
  s.k = k;
}

/// Runs A12new until ||r_k|| <= eps, breakdown, overflow or the iteration limit.
inline ConvergenceReport solve_a12new(const LinearOperator& a, const Vector& b, const Vector& x0, const Vector& y,
                                      const SolverConfig& cfg = {}, const IterationObserver& obs = {}) {
  cfg.validate(a.dim());
  detail::RunRecorder rec(a, b, cfg, obs);
  auto record = rec.observer();
  const std::size_t limit = cfg.iteration_limit(a.dim());

  try {
    A12NewState s = init_a12new(a, b, x0, y, cfg, record);
    if (rec.last_norm() <= cfg.eps) return rec.finish(Status::Converged);
    while (s.k < limit) {
      const auto c = a12new_coefficients(s, a, cfg);
      a12new_step(s, c);
      detail::notify(record, s.k, s.r[0], s.x[0], &s.z[0], &c);
      if (rec.last_norm() <= cfg.eps) return rec.finish(Status::Converged);
    }
  } catch (const BreakdownDetected& e) {
    return rec.finish_breakdown(e);
  } catch (const OverflowError&) {
    return rec.finish(Status::Overflow);
  }
  return rec.finish(Status::MaxIterations);
}

// ---------------------------------------------------------------------------
// A12
// ---------------------------------------------------------------------------

/// Sliding window for A12. r/x: index 0 is iterate k. y holds y_{k-2}..y_{k+1}
/// of the power sequence y_j = (A^T)^j y.
struct A12State {
  std::size_t k = 0;
  std::array<Vector, 3> r;
  std::array<Vector, 3> x;
  std::array<Vector, 4> y;
  Vector q1, q2, q3, y_next;
};

/// Initialization of A12: r_1, r_2, x_1, x_2 from c_0..c_3, and y_1..y_3.
/// Stops early (state.k < 2) once ||r_j|| <= cfg.eps.
inline A12State init_a12(const LinearOperator& a, const Vector& b, const Vector& x0, const Vector& y,
                         const SolverConfig& cfg = {}, const IterationObserver& obs = {}) {
  const std::size_t n = a.dim();
  detail::require_same_size(b.size(), n, "init_a12");
  detail::require_same_size(x0.size(), n, "init_a12");
  detail::require_same_size(y.size(), n, "init_a12");
  if (norm2(y) == 0.0) throw UsageError("y must be nonzero");
  const double tol = cfg.breakdown_threshold;

  A12State s;
  Vector r0 = subtract(b, a.matvec(x0));
  detail::check_finite(r0, 0, "r_0");
  s.r = {r0, Vector(n), Vector(n)};
  s.x = {x0, Vector(n), Vector(n)};
  s.k = 0;
  detail::notify(obs, 0, s.r[0], s.x[0], nullptr, nullptr);
  if (norm2(r0) <= cfg.eps) return s;

  const Vector p = a.matvec(r0);
  const Vector p1 = a.matvec(p);
  const double c0 = dot(y, r0), c1 = dot(y, p), c2 = dot(y, p1), c3 = dot(y, a.matvec(p1));
  detail::check_finite({c0, c1, c2, c3}, 1);

  detail::check_denominator(c1, norm2(y) * norm2(p), tol, 1, "c1");
  const double w = c0 / c1;
  Vector r1(n), x1(n);
  for (std::size_t i = 0; i < n; ++i) {
    r1[i] = r0[i] - w * p[i];
    x1[i] = x0[i] + w * r0[i];
  }
  detail::check_finite(r1, 1, "r_1");
  s.r = {r1, r0, Vector(n)};
  s.x = {x1, x0, Vector(n)};
  s.k = 1;
  detail::notify(obs, 1, s.r[0], s.x[0], nullptr, nullptr);
  if (norm2(r1) <= cfg.eps) return s;

  const double delta = c1 * c3 - c2 * c2;
  detail::check_denominator(delta, std::abs(c1 * c3) + c2 * c2, tol, 2, "delta");
  const double alpha = (c0 * c3 - c1 * c2) / delta;
  const double beta = (c0 * c2 - c1 * c1) / delta;
  Vector r2(n), x2(n);
  for (std::size_t i = 0; i < n; ++i) {
    r2[i] = r0[i] - alpha * p[i] + beta * p1[i];
    x2[i] = x0[i] + alpha * r0[i] - beta * p[i];
  }
  detail::check_finite(r2, 2, "r_2");
  s.r = {r2, r1, r0};
  s.x = {x2, x1, x0};
  Vector y1 = a.transpose_matvec(y);
  Vector y2 = a.transpose_matvec(y1);
  Vector y3 = a.transpose_matvec(y2);
  s.y = {y, std::move(y1), std::move(y2), std::move(y3)};
  s.k = 2;
  detail::notify(obs, 2, s.r[0], s.x[0], nullptr, nullptr);
  return s;
}

/// Coefficients of iterate k = state.k + 1 (requires state.k >= 2).
///
/// Fills y_next = y_{k+1}, q1 = A r_{k-2}, q2 = A q1 and q3 = A r_{k-3}.
inline RecurrenceCoefficients a12_coefficients(A12State& s, const LinearOperator& a, const SolverConfig& cfg = {}) {
  if (s.k < 2) throw UsageError("a12_coefficients: state not initialized past k=2");
  const std::size_t k = s.k + 1;
  const double tol = cfg.breakdown_threshold;
  const Vector& r_km2 = s.r[1];
  const Vector& r_km3 = s.r[2];
  const Vector& y_km3 = s.y[0];
  const Vector& y_km2 = s.y[1];
  const Vector& y_km1 = s.y[2];
  const Vector& y_k = s.y[3];

  s.y_next = a.transpose_matvec(y_k);
  detail::check_finite(s.y_next, k, "y_{k+1}");
  s.q1 = a.matvec(r_km2);
  s.q2 = a.matvec(s.q1);
  s.q3 = a.matvec(r_km3);

  const double a11 = dot(y_km2, r_km2);
  const double a13 = dot(y_km3, r_km3);
  const double a21 = dot(y_km1, r_km2);
  const double a22 = a11;
  const double a23 = dot(y_km2, r_km3);
  const double a31 = dot(y_k, r_km2);
  const double a32 = a21;
  const double a33 = dot(y_km1, r_km3);
  const double sv = dot(s.y_next, r_km2);
  const double tv = dot(y_k, r_km3);
  detail::check_finite({a11, a13, a21, a23, a31, a33, sv, tv}, k);

  detail::check_denominator(a13, norm2(y_km3) * norm2(r_km3), tol, k, "a13");
  detail::check_denominator(a22, norm2(y_km2) * norm2(r_km2), tol, k, "a22");

  RecurrenceCoefficients c;
  c.F = -a11 / a13;
  c.b1 = -a21 - a23 * c.F;
  c.b2 = -a31 - a33 * c.F;
  c.b3 = -sv - tv * c.F;
  const double minor = a22 * a33 - a32 * a23;
  c.Delta = a11 * minor + a13 * (a21 * a32 - a31 * a22);
  const double delta_scale = std::abs(a11) * (std::abs(a22 * a33) + std::abs(a32 * a23)) +
                             std::abs(a13) * (std::abs(a21 * a32) + std::abs(a31 * a22));
  detail::check_denominator(c.Delta, delta_scale, tol, k, "Delta_k");
  c.B = (c.b1 * minor + a13 * (c.b2 * a32 - c.b3 * a22)) / c.Delta;
  c.G = (c.b1 - a11 * c.B) / a13;
  c.C = (c.b2 - a21 * c.B - a23 * c.G) / a22;
  const double sum = c.C + c.G;
  detail::check_denominator(sum, std::abs(c.C) + std::abs(c.G), tol, k, "C_k+G_k");
  c.A = 1.0 / sum;
  detail::check_finite({c.A, c.B, c.C, c.F, c.G}, k);
  return c;
}

/// Applies the recurrence for r_k and x_k and rotates the windows.
inline void a12_step(A12State& s, const RecurrenceCoefficients& c) {
  const std::size_t n = s.r[0].size();
  const std::size_t k = s.k + 1;
  const Vector& r_km2 = s.r[1];
  const Vector& r_km3 = s.r[2];
  const Vector& x_km2 = s.x[1];
  const Vector& x_km3 = s.x[2];
  Vector rk(n), xk(n);
  for (std::size_t i = 0; i < n; ++i) {
    rk[i] = c.A * (s.q2[i] + c.B * s.q1[i] + c.C * r_km2[i] + c.F * s.q3[i] + c.G * r_km3[i]);
    xk[i] = c.A * (c.C * x_km2[i] + c.G * x_km3[i] - (s.q1[i] + c.B * r_km2[i] + c.F * r_km3[i]));
  }
  detail::check_finite(rk, k, "r_k");
  detail::check_finite(xk, k, "x_k");
  s.r = {std::move(rk), std::move(s.r[0]), std::move(s.r[1])};
  s.x = {std::move(xk), std::move(s.x[0]), std::move(s.x[1])};
  s.y = {std::move(s.y[1]), std::move(s.y[2]), std::move(s.y[3]), std::move(s.y_next)};
  s.y_next = Vector();
  s.k = k;
}

/// Runs A12 until ||r_k|| <= eps, breakdown, overflow or the iteration limit.
inline ConvergenceReport solve_a12(const LinearOperator& a, const Vector& b, const Vector& x0, const Vector& y,
                                   const SolverConfig& cfg = {}, const IterationObserver& obs = {}) {
  cfg.validate(a.dim());
  detail::RunRecorder rec(a, b, cfg, obs);
  auto record = rec.observer();
  const std::size_t limit = cfg.iteration_limit(a.dim());
  try {
    A12State s = init_a12(a, b, x0, y, cfg, record);
    if (rec.last_norm() <= cfg.eps) return rec.finish(Status::Converged);
    while (s.k < limit) {
      const auto c = a12_coefficients(s, a, cfg);
      a12_step(s, c);
      detail::notify(record, s.k, s.r[0], s.x[0], nullptr, &c);
      if (rec.last_norm() <= cfg.eps) return rec.finish(Status::Converged);
    }
  } catch (const BreakdownDetected& e) {
    return rec.finish_breakdown(e);
  } catch (const OverflowError&) {
    return rec.finish(Status::Overflow);
  }
  return rec.finish(Status::MaxIterations);
}

}  // namespace lanczos
