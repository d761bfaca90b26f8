// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace mfginv {

/// Integer lattice vector in Z^n, n <= 3. Unused trailing components are 0.
using Wavevector = std::array<int, 3>;

constexpr int kMaxDim = 3;

inline long norm2(const Wavevector& v) {
  return static_cast<long>(v[0]) * v[0] + static_cast<long>(v[1]) * v[1] +
         static_cast<long>(v[2]) * v[2];
}

inline int norm_inf(const Wavevector& v) {
  int m = 0;
  for (int c : v) m = std::max(m, c < 0 ? -c : c);
  return m;
}

inline Wavevector operator+(const Wavevector& a, const Wavevector& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Wavevector operator-(const Wavevector& a, const Wavevector& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Wavevector operator-(const Wavevector& a) { return {-a[0], -a[1], -a[2]}; }

inline bool is_zero(const Wavevector& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

std::string to_string(const Wavevector& v, int dim);

/// Uniform grid on the unit torus T^n = R^n / Z^n. Points are stored
/// row-major with axis 0 varying slowest.
class SpatialGrid {
 public:
  SpatialGrid(int dim, int points_per_axis);

  int dim() const noexcept { return dim_; }
  int points_per_axis() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  double spacing() const noexcept { return 1.0 / n_; }

  /// Coordinate x_axis of the flat point index.
  double coordinate(std::size_t flat, int axis) const;
  std::array<double, 3> point(std::size_t flat) const;

  /// Wrap-around frequency of a flat spectral index; components in [-N/2, N/2).
  Wavevector frequency(std::size_t flat) const;
  /// Flat spectral index of xi (taken modulo N per axis).
  std::size_t spectral_index(const Wavevector& xi) const;
  /// True when every component lies strictly inside (-N/2, N/2).
  bool resolves(const Wavevector& xi) const;
  /// True when some component equals -N/2 (unpaired Nyquist mode).
  bool is_nyquist(std::size_t flat) const;

  /// Spectral indices sorted by |xi|^2, then lexicographically on xi.
  const std::vector<std::size_t>& canonical_order() const { return canonical_; }

  friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_;
  }

 private:
  int dim_;
  int n_;
  std::size_t size_;
  std::vector<std::size_t> canonical_;
};

/// Uniform time nodes t_k = k T / M, k = 0..M.
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  double horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return steps_; }
  int nodes() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return horizon_ / steps_; }
  double node(int k) const { return k == steps_ ? horizon_ : k * dt(); }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.horizon_ == b.horizon_ && a.steps_ == b.steps_;
  }

 private:
  double horizon_;
  int steps_;
};

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* context);

}  // namespace mfginv
