// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "mfginv/errors.hpp"
#include "mfginv/grid.hpp"

namespace mfginv {

/// Samples of a scalar function on a SpatialGrid.
template <class T>
class BasicField {
 public:
  using value_type = T;

  explicit BasicField(SpatialGrid grid) : grid_(grid), values_(grid.size(), T{}) {}
  BasicField(SpatialGrid grid, std::vector<T> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw ValidationError("field: value count does not match grid size");
  }

  /// Samples f at every grid point; f takes the coordinate array.
  template <class Fn>
  static BasicField sample(const SpatialGrid& grid, Fn&& f) {
    BasicField out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values_[i] = f(grid.point(i));
    return out;
  }

  static BasicField constant(const SpatialGrid& grid, T c) {
    return BasicField(grid, std::vector<T>(grid.size(), c));
  }

  const SpatialGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  BasicField& operator+=(const BasicField& o) {
    check(o);
    for (std::size_t i = 0; i < size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  BasicField& operator-=(const BasicField& o) {
    check(o);
    for (std::size_t i = 0; i < size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  BasicField& operator*=(T s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  /// Pointwise product.
  BasicField& multiply(const BasicField& o) {
    check(o);
    for (std::size_t i = 0; i < size(); ++i) values_[i] *= o.values_[i];
    return *this;
  }
  /// this += a * o
  BasicField& axpy(T a, const BasicField& o) {
    check(o);
    for (std::size_t i = 0; i < size(); ++i) values_[i] += a * o.values_[i];
    return *this;
  }

  friend BasicField operator+(BasicField a, const BasicField& b) { return a += b; }
  friend BasicField operator-(BasicField a, const BasicField& b) { return a -= b; }
  friend BasicField operator*(T s, BasicField a) { return a *= s; }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
  }
  /// Root-mean-square over the torus (the discrete L^2 norm of a unit-volume domain).
  double l2_norm() const {
    double s = 0.0;
    for (const auto& v : values_) s += std::norm(v);
    return std::sqrt(s / static_cast<double>(size()));
  }
  T mean() const {
    T s{};
    for (const auto& v : values_) s += v;
    return s / static_cast<double>(size());
  }
  bool all_finite() const {
    for (const auto& v : values_)
      if (!std::isfinite(std::abs(v))) return false;
    return true;
  }

 private:
  void check(const BasicField& o) const { require_same_grid(grid_, o.grid_, "field arithmetic"); }

  SpatialGrid grid_;
  std::vector<T> values_;
};

using ScalarField = BasicField<double>;
using ComplexField = BasicField<std::complex<double>>;
using VectorField = std::vector<ScalarField>;

ComplexField to_complex(const ScalarField& f);
ScalarField real_part(const ComplexField& f);
ScalarField imag_part(const ComplexField& f);
ScalarField pointwise_product(const ScalarField& a, const ScalarField& b);

/// Real samples on a space-time tensor grid. Slice k lives at t_k; the flat
/// layout is slice-major, so each slice is a contiguous ScalarField payload.
class SpaceTimeField {
 public:
  SpaceTimeField(SpatialGrid grid, TimeGrid time)
      : grid_(grid), time_(time), values_(grid.size() * static_cast<std::size_t>(time.nodes()), 0.0) {}
  SpaceTimeField(SpatialGrid grid, TimeGrid time, std::vector<double> values);

  /// Samples f(x, t) on every node.
  template <class Fn>
  static SpaceTimeField sample(const SpatialGrid& grid, const TimeGrid& time, Fn&& f) {
    SpaceTimeField out(grid, time);
    for (int k = 0; k < time.nodes(); ++k) {
      const double t = time.node(k);
      auto s = out.slice_span(k);
      for (std::size_t i = 0; i < grid.size(); ++i) s[i] = f(grid.point(i), t);
    }
    return out;
  }

  const SpatialGrid& grid() const noexcept { return grid_; }
  const TimeGrid& time() const noexcept { return time_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<double> slice_span(int k) {
    return std::span<double>(values_).subspan(offset(k), grid_.size());
  }
  std::span<const double> slice_span(int k) const {
    return std::span<const double>(values_).subspan(offset(k), grid_.size());
  }
  ScalarField slice(int k) const;
  void set_slice(int k, const ScalarField& f);

  SpaceTimeField& operator+=(const SpaceTimeField& o);
  SpaceTimeField& operator-=(const SpaceTimeField& o);
  SpaceTimeField& operator*=(double s);
  friend SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b) { return a -= b; }
  friend SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b) { return a += b; }

  double sup_norm() const;
  double l2_norm() const;
  bool all_finite() const;

 private:
  std::size_t offset(int k) const;

  SpatialGrid grid_;
  TimeGrid time_;
  std::vector<double> values_;
};

/// Relative discrete L^2 error ||a - b|| / ||b||; absolute when ||b|| = 0.
double relative_l2_error(const ScalarField& a, const ScalarField& truth);
double relative_l2_error(const SpaceTimeField& a, const SpaceTimeField& truth);

}  // namespace mfginv
