#pragma once

// Sweep harness: solver x problem-size runs with table/csv/jsonl reports.

#include <cstddef>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lanczos/errors.hpp"
#include "lanczos/linear_operator.hpp"
#include "lanczos/problem.hpp"
#include "lanczos/solvers.hpp"
#include "lanczos/vector.hpp"

namespace lanczos::bench {

enum class Algorithm { A12, A12New };
enum class OutputFormat { Table, Csv, Jsonl };

inline std::string to_string(Algorithm a) { return a == Algorithm::A12 ? "a12" : "a12new"; }

/// "a12", "a12new", "all" or a comma list of the first two.
inline std::vector<Algorithm> parse_algorithms(std::string_view text) {
  std::vector<Algorithm> out;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "a12") {
      out.push_back(Algorithm::A12);
    } else if (item == "a12new") {
      out.push_back(Algorithm::A12New);
    } else if (item == "all") {
      out.push_back(Algorithm::A12);
      out.push_back(Algorithm::A12New);
    } else {
      throw UsageError("unknown algorithm '" + item + "' (expected a12, a12new or all)");
    }
  }
  if (out.empty()) throw UsageError("no algorithm given");
  return out;
}

/// "start:stop:step" (inclusive) or a comma-separated list.
inline std::vector<std::size_t> parse_dims(std::string_view text) {
  auto to_size = [](const std::string& s) -> std::size_t {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      throw UsageError("bad dimension '" + s + "'");
    }
    if (pos != s.size() || s.front() == '-') throw UsageError("bad dimension '" + s + "'");
    return static_cast<std::size_t>(v);
  };
  std::vector<std::size_t> out;
  const std::string s(text);
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("range must be start:stop:step");
    const auto start = to_size(parts[0]), stop = to_size(parts[1]), step = to_size(parts[2]);
    if (step == 0) throw UsageError("range step must be positive");
    for (std::size_t n = start; n <= stop; n += step) out.push_back(n);
  } else {
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, ',')) {
      if (!p.empty()) out.push_back(to_size(p));
    }
  }
  if (out.empty()) throw UsageError("no dimensions given");
  return out;
}

inline OutputFormat parse_format(std::string_view text) {
  if (text == "table") return OutputFormat::Table;
  if (text == "csv") return OutputFormat::Csv;
  if (text == "jsonl") return OutputFormat::Jsonl;
  throw UsageError("unknown output format '" + std::string(text) + "'");
}

/// Left starting vector: r0, all ones, or read from a file.
struct YChoice {
  enum class Kind { R0, Ones, File };
  Kind kind = Kind::R0;
  std::string path;

  static YChoice parse(std::string_view text) {
    if (text == "r0") return {Kind::R0, {}};
    if (text == "ones") return {Kind::Ones, {}};
    if (text.empty()) throw UsageError("empty --y value");
    return {Kind::File, std::string(text)};
  }
};

struct RunConfig {
  std::vector<Algorithm> algorithms{Algorithm::A12, Algorithm::A12New};
  std::vector<std::size_t> dims;
  double delta = 0.0;
  double eps = 1.0e-5;
  std::optional<std::size_t> max_iterations;
  YChoice y;
  OutputFormat format = OutputFormat::Table;
  std::optional<std::filesystem::path> history_dir;
  std::optional<std::filesystem::path> matrix_path;
  std::optional<std::filesystem::path> rhs_path;

  void validate() const {
    if (algorithms.empty()) throw UsageError("at least one algorithm is required");
    if (!matrix_path && dims.empty()) throw UsageError("at least one dimension is required");
    if (!(eps > 0.0)) throw UsageError("eps must be positive");
    if (max_iterations && *max_iterations < 4) throw UsageError("max-iters must be >= 4");
    if (rhs_path && !matrix_path) throw UsageError("--rhs requires --matrix");
    if (!matrix_path) {
      for (auto n : dims) ProblemSpec{n, delta}.validate();
    }
  }
};

/// One line of a sweep report.
struct RunRecord {
  std::string algorithm;
  std::size_t n = 0;
  double delta = 0.0;
  std::string status;
  std::size_t iterations = 0;
  double final_residual = 0.0;
  double time_sec = 0.0;

  bool converged() const { return status == "converged"; }
};

inline constexpr std::string_view kCsvHeader = "algorithm,n,delta,status,iterations,final_residual,time_sec";

namespace detail {

inline std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace detail

inline std::string to_csv(const RunRecord& r) {
  std::ostringstream out;
  out << r.algorithm << ',' << r.n << ',' << detail::format("%g", r.delta) << ',' << r.status << ','
      << r.iterations << ',' << detail::format("%.6e", r.final_residual) << ','
      << detail::format("%.6f", r.time_sec);
  return out.str();
}

inline std::string to_jsonl(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["algorithm"] = r.algorithm;
  j["n"] = r.n;
  j["delta"] = r.delta;
  j["status"] = r.status;
  j["iterations"] = r.iterations;
  j["final_residual"] = r.final_residual;
  j["time_sec"] = std::stod(detail::format("%.6f", r.time_sec));
  return j.dump();
}

inline std::string table_header() {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %6s %8s %-28s %6s %13s %10s", "alg", "n", "delta", "status", "iters",
                "||r_k||", "t(sec)");
  return buf;
}

inline std::string to_table_row(const RunRecord& r) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-8s %6zu %8g %-28s %6zu %13.4e %10.6f", r.algorithm.c_str(), r.n, r.delta,
                r.status.c_str(), r.iterations, r.final_residual, r.time_sec);
  return buf;
}

/// One "k norm" line per recorded iterate, k = 0..iterations.
inline void emit_history(const ConvergenceReport& report, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write history file '" + path.string() + "'");
  char buf[64];
  for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", report.residual_history[k]);
    out << k << ' ' << buf << '\n';
  }
  if (!out) throw std::runtime_error("failed writing history file '" + path.string() + "'");
}

inline std::filesystem::path history_path(const std::filesystem::path& dir, Algorithm alg, std::size_t n) {
  return dir / (to_string(alg) + "_n" + std::to_string(n) + ".dat");
}

/// A single solver run on an assembled system.
inline ConvergenceReport run_solver(Algorithm alg, const LinearOperator& a, const Vector& b, const Vector& y,
                                    const SolverConfig& cfg) {
  const Vector x0(a.dim());
  return alg == Algorithm::A12 ? solve_a12(a, b, x0, y, cfg) : solve_a12new(a, b, x0, y, cfg);
}

namespace detail {

struct System {
  LinearOperator a;
  Vector b;
};

inline Vector choose_y(const YChoice& choice, const System& sys) {
  switch (choice.kind) {
    case YChoice::Kind::R0: return sys.b;  // x0 = 0
    case YChoice::Kind::Ones: return Vector::ones(sys.a.dim());
    case YChoice::Kind::File: {
      Vector y = load_vector(choice.path);
      if (y.size() != sys.a.dim()) {
        throw DimensionError("y file has length " + std::to_string(y.size()) + ", system has n=" +
                             std::to_string(sys.a.dim()));
      }
      return y;
    }
  }
  return sys.b;
}

}  // namespace detail

/// Executes every (algorithm, n) pair in order and writes one record per run.
/// Returns 0 iff every run converged. Per-run failures (bad files, breakdown)
/// are reported and do not abort the sweep; an invalid config throws UsageError.
inline int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.validate();

  std::vector<std::size_t> sizes = cfg.dims;
  std::optional<detail::System> external;
  if (cfg.matrix_path) {
    try {
      auto a = load_matrix_market(*cfg.matrix_path);
      Vector b = cfg.rhs_path ? load_vector(*cfg.rhs_path) : a.matvec(Vector::ones(a.dim()));
      if (b.size() != a.dim()) throw DimensionError("rhs length does not match matrix dimension");
      sizes = {a.dim()};
      external = detail::System{std::move(a), std::move(b)};
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    }
  }

  if (cfg.format == OutputFormat::Csv) out << kCsvHeader << '\n';
  if (cfg.format == OutputFormat::Table) out << table_header() << '\n';

  bool all_converged = true;
  for (Algorithm alg : cfg.algorithms) {
    for (std::size_t n : sizes) {
      RunRecord rec;
      rec.algorithm = to_string(alg);
      rec.n = n;
      rec.delta = cfg.delta;
      try {
        detail::System sys = external ? *external : [&] {
          auto p = generate_problem(ProblemSpec{n, cfg.delta});
          return detail::System{std::move(p.a), std::move(p.rhs)};
        }();
        const Vector y = detail::choose_y(cfg.y, sys);
        SolverConfig scfg;
        scfg.eps = cfg.eps;
        scfg.max_iterations = cfg.max_iterations;
        const auto report = run_solver(alg, sys.a, sys.b, y, scfg);
        rec.status = report.status_token();
        rec.iterations = report.iterations;
        rec.final_residual = report.final_residual;
        rec.time_sec = report.wall_time;
        if (cfg.history_dir) {
          try {
            emit_history(report, history_path(*cfg.history_dir, alg, n));
          } catch (const std::exception& e) {
            err << "warning: " << e.what() << '\n';
          }
        }
      } catch (const std::exception& e) {
        rec.status = "error";
        err << "error: " << rec.algorithm << " n=" << n << ": " << e.what() << '\n';
      }
      all_converged = all_converged && rec.converged();
      switch (cfg.format) {
        case OutputFormat::Table: out << to_table_row(rec) << '\n'; break;
        case OutputFormat::Csv: out << to_csv(rec) << '\n'; break;
        case OutputFormat::Jsonl: out << to_jsonl(rec) << '\n'; break;
      }
    }
  }
  return all_converged ? 0 : 1;
}

}  // namespace lanczos::bench
