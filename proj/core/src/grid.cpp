// SPDX-License-Identifier: Apache-2.0
#include "mfginv/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "mfginv/errors.hpp"

namespace mfginv {

std::string to_string(const Wavevector& v, int dim) {
  std::ostringstream os;
  os << '(';
  for (int j = 0; j < dim; ++j) os << (j ? "," : "") << v[j];
  os << ')';
  return os.str();
}

SpatialGrid::SpatialGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
  if (dim < 1 || dim > kMaxDim)
    throw ValidationError("grid: dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (points_per_axis < 4)
    throw ValidationError("grid: points_per_axis must be >= 4, got " +
                          std::to_string(points_per_axis));
  size_ = 1;
  for (int j = 0; j < dim; ++j) size_ *= static_cast<std::size_t>(n_);

  canonical_.resize(size_);
  std::iota(canonical_.begin(), canonical_.end(), std::size_t{0});
  std::vector<Wavevector> freq(size_);
  for (std::size_t i = 0; i < size_; ++i) freq[i] = frequency(i);
  std::stable_sort(canonical_.begin(), canonical_.end(), [&](std::size_t a, std::size_t b) {
    const long na = norm2(freq[a]), nb = norm2(freq[b]);
    if (na != nb) return na < nb;
    return freq[a] < freq[b];
  });
}

double SpatialGrid::coordinate(std::size_t flat, int axis) const {
  std::size_t stride = 1;
  for (int j = dim_ - 1; j > axis; --j) stride *= static_cast<std::size_t>(n_);
  const auto idx = (flat / stride) % static_cast<std::size_t>(n_);
  return static_cast<double>(idx) / n_;
}

std::array<double, 3> SpatialGrid::point(std::size_t flat) const {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int j = dim_ - 1; j >= 0; --j) {
    x[j] = static_cast<double>(flat % static_cast<std::size_t>(n_)) / n_;
    flat /= static_cast<std::size_t>(n_);
  }
  return x;
}

Wavevector SpatialGrid::frequency(std::size_t flat) const {
  Wavevector xi{0, 0, 0};
  for (int j = dim_ - 1; j >= 0; --j) {
    const int k = static_cast<int>(flat % static_cast<std::size_t>(n_));
    xi[j] = k < n_ / 2 ? k : k - n_;
    flat /= static_cast<std::size_t>(n_);
  }
  return xi;
}

std::size_t SpatialGrid::spectral_index(const Wavevector& xi) const {
  std::size_t flat = 0;
  for (int j = 0; j < dim_; ++j) {
    int k = xi[j] % n_;
    if (k < 0) k += n_;
    flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(k);
  }
  return flat;
}

bool SpatialGrid::resolves(const Wavevector& xi) const {
  for (int j = 0; j < dim_; ++j)
    if (2 * std::abs(xi[j]) >= n_) return false;
  for (int j = dim_; j < kMaxDim; ++j)
    if (xi[j] != 0) return false;
  return true;
}

bool SpatialGrid::is_nyquist(std::size_t flat) const {
  const Wavevector xi = frequency(flat);
  for (int j = 0; j < dim_; ++j)
    if (xi[j] == -n_ / 2) return true;
  return false;
}

TimeGrid::TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ValidationError("time grid: horizon must be positive and finite");
  if (steps < 2) throw ValidationError("time grid: steps must be >= 2");
}

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* context) {
  if (!(a == b))
    throw ValidationError(std::string(context) + ": grid mismatch (n=" + std::to_string(a.dim()) +
                          ",N=" + std::to_string(a.points_per_axis()) + " vs n=" +
                          std::to_string(b.dim()) + ",N=" + std::to_string(b.points_per_axis()) +
                          ")");
}

}  // namespace mfginv
