#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace lanczos {

/// Operand sizes do not agree (vector length vs. operator dimension).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid configuration or input supplied by the caller.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file; carries the 1-based line number where parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A non-finite value appeared in an intermediate result.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// A denominator of the recurrence (or a Hankel pivot) fell below its relative floor.
class BreakdownDetected : public std::runtime_error {
 public:
  BreakdownDetected(std::size_t k, std::string denominator)
      : std::runtime_error("breakdown at k=" + std::to_string(k) + " in " + denominator),
        k_(k),
        denominator_(std::move(denominator)) {}

  std::size_t k() const noexcept { return k_; }
  const std::string& denominator() const noexcept { return denominator_; }

 private:
  std::size_t k_;
  std::string denominator_;
};

}  // namespace lanczos
