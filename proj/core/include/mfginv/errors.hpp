// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfginv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: shape mismatch, out-of-range parameter, malformed file.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation ran but could not produce a trustworthy answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, int step, double time)
      : NumericalError(what), step_(step), time_(time) {}
  int step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  int step_;
  double time_;
};

class NoConvergenceError : public NumericalError {
 public:
  NoConvergenceError(const std::string& what, int iterations, double last_ratio)
      : NumericalError(what), iterations_(iterations), last_ratio_(last_ratio) {}
  int iterations() const noexcept { return iterations_; }
  double last_ratio() const noexcept { return last_ratio_; }

 private:
  int iterations_;
  double last_ratio_;
};

/// The time step violates the explicit-term stability bound.
class StabilityError : public ValidationError {
 public:
  StabilityError(const std::string& what, double max_dt)
      : ValidationError(what), max_dt_(max_dt) {}
  double max_dt() const noexcept { return max_dt_; }

 private:
  double max_dt_;
};

/// Requested spectral cutoff needs more amplification than the guard allows.
class CutoffTooAggressive : public ValidationError {
 public:
  CutoffTooAggressive(const std::string& what, int max_admissible)
      : ValidationError(what), max_admissible_(max_admissible) {}
  int max_admissible() const noexcept { return max_admissible_; }

 private:
  int max_admissible_;
};

/// A recovery was asked for frequencies that no probe reaches.
class InsufficientProbes : public ValidationError {
 public:
  InsufficientProbes(const std::string& what, std::vector<std::array<int, 3>> missing)
      : ValidationError(what), missing_(std::move(missing)) {}
  const std::vector<std::array<int, 3>>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::array<int, 3>> missing_;
};

/// Syntax error in an expression or scenario file; positions are 1-based.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, int line, int column)
      : ValidationError(what + " at line " + std::to_string(line) + ", column " +
                        std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace mfginv
