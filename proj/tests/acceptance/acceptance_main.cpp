// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lanczos/lanczos.hpp"
#include "test_support.hpp"

namespace {

using namespace lanczos;
using testing::Dense;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, const Outcome& o) {
  std::printf("[%s] %s %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

using Solver = std::function<ConvergenceReport(const LinearOperator&, const Vector&, const Vector&, const Vector&,
                                               const SolverConfig&, const IterationObserver&)>;

const Solver kA12 = [](const LinearOperator& a, const Vector& b, const Vector& x0, const Vector& y,
                       const SolverConfig& c, const IterationObserver& o) { return solve_a12(a, b, x0, y, c, o); };
const Solver kA12New = [](const LinearOperator& a, const Vector& b, const Vector& x0, const Vector& y,
                          const SolverConfig& c, const IterationObserver& o) {
  return solve_a12new(a, b, x0, y, c, o);
};

// ---------------------------------------------------------------------------

Outcome ac1_small_sweep() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream bad;
  for (const auto& [name, solve] : {std::pair{"a12", kA12}, std::pair{"a12new", kA12New}}) {
    for (std::size_t n = 10; n <= 100; n += 10) {
      const auto p = generate_problem(ProblemSpec{n, 0.0});
      const auto rep = solve(p.a, p.rhs, Vector(n), p.rhs, SolverConfig{}, {});
      if (rep.status != Status::Converged || !(rep.final_residual <= 1e-5)) {
        o.pass = false;
        bad << ' ' << name << "/n=" << n << '(' << rep.status_token() << " at k=" << rep.iterations
            << ", ||r|| " << fmt("%.2e", rep.final_residual) << ')';
      }
    }
  }
  const double t = seconds_since(t0);
  if (t >= 5.0) o.pass = false;
  o.detail = "a12 and a12new, n=10..100, final ||r|| <= 1e-5; " + fmt("%.3f s (limit 5 s)", t);
  if (!o.pass) o.detail += ";" + (bad.str().empty() ? std::string(" too slow") : bad.str());
  return o;
}

Outcome ac2_large() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = generate_problem(ProblemSpec{500, 0.0});
  SolverConfig cfg;
  cfg.max_iterations = 5000;
  const auto rep = solve_a12new(p.a, p.rhs, Vector(500), p.rhs, cfg);
  const double t = seconds_since(t0);
  o.pass = rep.status == Status::Converged && rep.final_residual <= 1e-5 && t < 30.0;
  o.detail = "a12new n=500: " + rep.status_token() + " at k=" + std::to_string(rep.iterations) + ", ||r|| = " +
             fmt("%.3e", rep.final_residual) + ", " + fmt("%.3f s (limit 30 s)", t);
  if (rep.status == Status::Breakdown) o.detail += ", breakdown k=" + std::to_string(rep.breakdown_k);
  return o;
}

// Records r_k (and z_k when available) for k = 0..kmax.
struct Trace {
  std::vector<Vector> r, z;
  ConvergenceReport report;
};

Trace trace(const Solver& solve, const testing::RandomSystem& sys, std::size_t kmax, BkSign sign) {
  Trace t;
  SolverConfig cfg;
  cfg.eps = 1e-300;
  cfg.max_iterations = kmax;
  cfg.bk_sign = sign;
  t.report = solve(sys.a, sys.b, Vector(sys.b.size()), sys.y, cfg, [&](const IterationView& v) {
    t.r.push_back(v.r);
    if (v.z) t.z.push_back(*v.z);
  });
  return t;
}

std::vector<std::uint64_t> accepted_seeds(std::size_t count, std::size_t n, std::size_t kmax, std::uint64_t& drawn) {
  std::vector<std::uint64_t> seeds;
  drawn = 0;
  for (std::uint64_t seed = 1; seeds.size() < count; ++seed) {
    ++drawn;
    const auto sys = testing::make_random_system(seed, n);
    if (testing::well_conditioned(sys.a, sys.b, sys.y, kmax)) seeds.push_back(seed);
  }
  return seeds;
}

Outcome ac3_oracle_equivalence() {
  Outcome o;
  constexpr std::size_t n = 8, kmax = 6;
  std::uint64_t drawn = 0;
  const auto seeds = accepted_seeds(50, n, kmax, drawn);
  double worst_new = 0.0, worst_old = 0.0, best_negated = INFINITY;
  std::ostringstream bad;
  for (auto seed : seeds) {
    const auto sys = testing::make_random_system(seed, n);
    const auto c = moments(sys.a, sys.y, sys.b, 2 * kmax);
    std::vector<Vector> want;
    for (std::size_t k = 0; k <= kmax; ++k) want.push_back(oracle_residual(sys.a, sys.b, fop_coefficients(c, k)));

    const auto compare = [&](const Trace& t, double& worst, const char* name) {
      if (t.r.size() != kmax + 1) {
        o.pass = false;
        bad << ' ' << name << "/seed=" << seed << '(' << t.report.status_token() << ')';
        return;
      }
      for (std::size_t k = 0; k <= kmax; ++k) {
        const double e = testing::rel_diff(t.r[k], want[k]);
        worst = std::max(worst, e);
        if (!(e <= 1e-7)) {
          o.pass = false;
          bad << ' ' << name << "/seed=" << seed << "/k=" << k;
        }
      }
    };
    compare(trace(kA12New, sys, kmax, BkSign::Positive), worst_new, "a12new");
    compare(trace(kA12, sys, kmax, BkSign::Positive), worst_old, "a12");

    const auto negated = trace(kA12New, sys, 4, BkSign::Negated);
    if (negated.r.size() == 5) best_negated = std::min(best_negated, testing::rel_diff(negated.r[4], want[4]));
  }
  // The alternative sign must visibly fail, otherwise the suite is not discriminating.
  if (!(best_negated > 1e-3)) {
    o.pass = false;
    bad << " negated-sign-not-rejected";
  }
  o.detail = std::to_string(seeds.size()) + " systems (n=8, " + std::to_string(drawn) + " drawn), k<=6: max rel err a12new " +
             fmt("%.2e", worst_new) + ", a12 " + fmt("%.2e", worst_old) + " (tol 1e-7); B_k sign pinned to " +
             "b3/(z[k-1],A r[k-2]); negated sign min err at k=4 " + fmt("%.2e", best_negated) + bad.str();
  return o;
}

Outcome ac4_invariants() {
  Outcome o;
  std::ostringstream bad;
  auto fail = [&](const std::string& what) {
    if (o.pass || bad.str().size() < 400) bad << ' ' << what;
    o.pass = false;
  };
  double worst_norm = 0.0, worst_cons = 0.0, worst_orth = 0.0, worst_fop = 0.0, worst_z = 0.0, worst_adj = 0.0;

  // Normalization and consistency at every iteration: test problems and random systems, both solvers.
  auto watch = [&](const LinearOperator& a, const Vector& b, const std::string& tag) {
    const double norm_a = a.frobenius_norm();
    return [&, norm_a, tag](const IterationView& v) {
      const double scale = norm2(b) + norm_a * norm2(v.x);
      const double gap = norm2(subtract(subtract(b, a.matvec(v.x)), v.r)) / scale;
      worst_cons = std::max(worst_cons, gap);
      if (!(gap <= 1e-10)) fail(tag + "/cons/k=" + std::to_string(v.k));
      if (v.coefficients) {
        const double e = std::abs(v.coefficients->A * (v.coefficients->C + v.coefficients->G) - 1.0);
        worst_norm = std::max(worst_norm, e);
        if (!(e <= 1e-12)) fail(tag + "/norm/k=" + std::to_string(v.k));
      }
    };
  };
  for (std::size_t n = 10; n <= 100; n += 10) {
    const auto p = generate_problem(ProblemSpec{n, 0.0});
    solve_a12(p.a, p.rhs, Vector(n), p.rhs, {}, watch(p.a, p.rhs, "a12/n=" + std::to_string(n)));
    solve_a12new(p.a, p.rhs, Vector(n), p.rhs, {}, watch(p.a, p.rhs, "a12new/n=" + std::to_string(n)));
  }

  std::uint64_t drawn = 0;
  for (auto seed : accepted_seeds(30, 8, 6, drawn)) {
    const auto sys = testing::make_random_system(seed, 8);
    const std::string tag = "seed=" + std::to_string(seed);
    SolverConfig cfg;
    cfg.eps = 1e-300;
    cfg.max_iterations = 6;
    solve_a12(sys.a, sys.b, Vector(8), sys.y, cfg, watch(sys.a, sys.b, "a12/" + tag));
    const auto t = trace(kA12New, sys, 6, BkSign::Positive);
    solve_a12new(sys.a, sys.b, Vector(8), sys.y, cfg, watch(sys.a, sys.b, "a12new/" + tag));

    const auto c = moments(sys.a, sys.y, sys.b, 12);
    const double norm_a = sys.a.frobenius_norm();
    for (std::size_t k = 1; k < t.r.size(); ++k) {
      const auto p = fop_coefficients(c, k);
      // FOP orthogonality on the moment functional
      for (std::size_t i = 0; i < k; ++i) {
        const double e = std::abs(apply_functional(c, poly_shift(p.coeffs(), i))) / c.max_abs();
        worst_fop = std::max(worst_fop, e);
        if (!(e <= 1e-10)) fail(tag + "/fop/k=" + std::to_string(k));
      }
      // solver residual orthogonal to the left Krylov space
      Vector w = sys.y;
      for (std::size_t i = 0; i < k; ++i) {
        const double e = std::abs(dot(w, t.r[k])) / (norm2(sys.y) * norm2(sys.b) * std::pow(norm_a, i));
        worst_orth = std::max(worst_orth, e);
        if (!(e <= 1e-7)) fail(tag + "/orth/k=" + std::to_string(k));
        w = sys.a.transpose_matvec(w);
      }
      // left vectors
      const double ez = testing::rel_diff(t.z[k], oracle_left_vector(sys.a, sys.y, p));
      worst_z = std::max(worst_z, ez);
      if (!(ez <= 1e-7)) fail(tag + "/z/k=" + std::to_string(k));
    }
  }

  // Adjoint identity, dense and CSR storage.
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + trial % 20;
    const auto dense = LinearOperator::dense(n, testing::random_dense(rng, n, 0.0));
    const auto csr = generate_problem(ProblemSpec{static_cast<std::size_t>(10 * (1 + trial % 5)), 0.1 * trial}).a;
    for (const auto* a : {&dense, &csr}) {
      const Vector u = testing::random_vector(rng, a->dim());
      const Vector v = testing::random_vector(rng, a->dim());
      const double e = std::abs(dot(a->transpose_matvec(u), v) - dot(u, a->matvec(v))) /
                       (norm2(u) * a->frobenius_norm() * norm2(v));
      worst_adj = std::max(worst_adj, e);
      if (!(e <= 1e-12)) fail("adjoint/trial=" + std::to_string(trial));
    }
  }

  o.detail = "max |A(C+G)-1| " + fmt("%.1e", worst_norm) + " (1e-12), consistency " + fmt("%.1e", worst_cons) +
             " (1e-10), FOP orth " + fmt("%.1e", worst_fop) + " (1e-10), (A^T^i y, r_k) " + fmt("%.1e", worst_orth) +
             " (1e-7), z_k " + fmt("%.1e", worst_z) + " (1e-7), adjoint " + fmt("%.1e", worst_adj) + " (1e-12)" +
             bad.str();
  return o;
}

// A = S D S^{-1} with D = diag(1..n) and S = I + 0.2 N(0,1): nonsymmetric, eigenvalues 1..n.
testing::RandomSystem separated_spectrum_system(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 0.2);
  Dense s(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s[i * n + j] = (i == j ? 1.0 : 0.0) + dist(rng);
  }
  // columns of S^{-1}
  Dense s_inv(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector e(n);
    e[j] = 1.0;
    const Vector col = testing::dense_solve(s, e);
    for (std::size_t i = 0; i < n; ++i) s_inv[i * n + j] = col[i];
  }
  Dense a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t m = 0; m < n; ++m) sum += s[i * n + m] * static_cast<double>(m + 1) * s_inv[m * n + j];
      a[i * n + j] = sum;
    }
  }
  auto op = LinearOperator::dense(n, a);
  Vector b = testing::random_vector(rng, n);
  Vector y = testing::random_vector(rng, n);
  return {std::move(a), std::move(op), std::move(b), std::move(y)};
}

Outcome ac5_finite_termination() {
  Outcome o;
  constexpr std::size_t n = 8;
  std::ostringstream bad;
  double worst[2] = {0.0, 0.0};
  std::size_t latest[2] = {0, 0};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto sys = separated_spectrum_system(seed, n);
    const double target = 1e-8 * norm2(sys.b);
    SolverConfig cfg;
    cfg.eps = target;
    cfg.max_iterations = n + 2;
    int idx = 0;
    for (const auto& [name, solve] : {std::pair{"a12", kA12}, std::pair{"a12new", kA12New}}) {
      const auto rep = solve(sys.a, sys.b, Vector(n), sys.y, cfg, {});
      const double rel = rep.residual_history.back() / norm2(sys.b);
      if (rep.status == Status::Converged) {
        latest[idx] = std::max(latest[idx], rep.iterations);
      } else {
        worst[idx] = std::max(worst[idx], rel);
        o.pass = false;
        bad << ' ' << name << "/seed=" << seed << '(' << rep.status_token() << " k=" << rep.iterations << " rel "
            << fmt("%.1e", rel) << ')';
      }
      ++idx;
    }
  }
  o.detail = "20 systems n=8, eigenvalues 1..8, target ||r_k|| <= 1e-8 ||r_0|| by k=10: latest k a12 " +
             std::to_string(latest[0]) + ", a12new " + std::to_string(latest[1]) + bad.str();
  return o;
}

Dense hand_reference(std::size_t n) {
  Dense d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    d[i * n + i] = 4.0;
    if (i % 10 != 9 && i + 1 < n) d[i * n + i + 1] = -1.0;
    if (i % 10 != 0) d[i * n + i - 1] = -1.0;
    if (i + 10 < n) d[i * n + i + 10] = -1.0;
    if (i >= 10) d[i * n + i - 10] = -1.0;
  }
  return d;
}

Outcome ac6_generator() {
  Outcome o;
  std::ostringstream msg;
  for (std::size_t n : {10u, 20u}) {
    const auto p = generate_problem(ProblemSpec{n, 0.0});
    const Dense d = p.a.to_dense();
    const bool entries = d == hand_reference(n);
    const bool rhs = p.rhs == testing::dense_matvec(d, Vector::ones(n));
    const bool sym = d == testing::transpose(d, n);
    o.pass = o.pass && entries && rhs && sym;
    msg << " n=" << n << ": entries " << (entries ? "ok" : "MISMATCH") << ", rhs " << (rhs ? "ok" : "MISMATCH")
        << ", symmetric " << (sym ? "yes" : "NO") << ';';
  }
  o.detail = msg.str();
  return o;
}

Outcome ac7_determinism() {
  Outcome o;
  bench::RunConfig cfg;
  cfg.algorithms = bench::parse_algorithms("all");
  cfg.dims = bench::parse_dims("10:100:10");
  cfg.format = bench::OutputFormat::Csv;
  auto strip = [](const std::string& text) {
    std::istringstream in(text);
    std::string out;
    for (std::string line; std::getline(in, line);) out += line.substr(0, line.rfind(',')) + '\n';
    return out;
  };
  std::ostringstream a, b, err;
  bench::run_sweep(cfg, a, err);
  bench::run_sweep(cfg, b, err);
  cfg.format = bench::OutputFormat::Jsonl;
  std::ostringstream ja, jb;
  bench::run_sweep(cfg, ja, err);
  bench::run_sweep(cfg, jb, err);
  auto strip_json = [](const std::string& text) {
    std::istringstream in(text);
    std::string out;
    for (std::string line; std::getline(in, line);) out += line.substr(0, line.find(",\"time_sec\"")) + '\n';
    return out;
  };
  const bool csv_same = strip(a.str()) == strip(b.str());
  const bool json_same = strip_json(ja.str()) == strip_json(jb.str());
  o.pass = csv_same && json_same && !a.str().empty();
  o.detail = std::string("two sweeps of 20 runs: csv ") + (csv_same ? "identical" : "DIFFER") + ", jsonl " +
             (json_same ? "identical" : "DIFFER") + " (time_sec excluded)";
  return o;
}

}  // namespace

int main() {
  report("AC1", "small sweep converges", ac1_small_sweep());
  report("AC2", "a12new at n=500", ac2_large());
  report("AC3", "oracle equivalence", ac3_oracle_equivalence());
  report("AC4", "invariant suite", ac4_invariants());
  report("AC5", "finite termination", ac5_finite_termination());
  report("AC6", "generator correctness", ac6_generator());
  report("AC7", "determinism", ac7_determinism());
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
