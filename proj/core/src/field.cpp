// SPDX-License-Identifier: Apache-2.0
#include "mfginv/field.hpp"

#include <algorithm>

namespace mfginv {

ComplexField to_complex(const ScalarField& f) {
  ComplexField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

ScalarField real_part(const ComplexField& f) {
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

ScalarField imag_part(const ComplexField& f) {
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].imag();
  return out;
}

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
  ScalarField out = a;
  out.multiply(b);
  return out;
}

SpaceTimeField::SpaceTimeField(SpatialGrid grid, TimeGrid time, std::vector<double> values)
    : grid_(grid), time_(time), values_(std::move(values)) {
  if (values_.size() != grid_.size() * static_cast<std::size_t>(time_.nodes()))
    throw ValidationError("space-time field: value count does not match (M+1)*N^n");
}

std::size_t SpaceTimeField::offset(int k) const {
  if (k < 0 || k > time_.steps())
    throw ValidationError("space-time field: time index " + std::to_string(k) + " out of range");
  return static_cast<std::size_t>(k) * grid_.size();
}

ScalarField SpaceTimeField::slice(int k) const {
  auto s = slice_span(k);
  return ScalarField(grid_, std::vector<double>(s.begin(), s.end()));
}

void SpaceTimeField::set_slice(int k, const ScalarField& f) {
  require_same_grid(grid_, f.grid(), "set_slice");
  std::copy(f.values().begin(), f.values().end(), slice_span(k).begin());
}

SpaceTimeField& SpaceTimeField::operator+=(const SpaceTimeField& o) {
  require_same_grid(grid_, o.grid_, "space-time arithmetic");
  if (!(time_ == o.time_)) throw ValidationError("space-time arithmetic: time grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

SpaceTimeField& SpaceTimeField::operator-=(const SpaceTimeField& o) {
  require_same_grid(grid_, o.grid_, "space-time arithmetic");
  if (!(time_ == o.time_)) throw ValidationError("space-time arithmetic: time grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

SpaceTimeField& SpaceTimeField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

double SpaceTimeField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SpaceTimeField::l2_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s / static_cast<double>(values_.size()));
}

bool SpaceTimeField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double relative_l2_error(const ScalarField& a, const ScalarField& truth) {
  const double denom = truth.l2_norm();
  const double num = (a - truth).l2_norm();
  return denom > 0.0 ? num / denom : num;
}

double relative_l2_error(const SpaceTimeField& a, const SpaceTimeField& truth) {
  const double denom = truth.l2_norm();
  const double num = (a - truth).l2_norm();
  return denom > 0.0 ? num / denom : num;
}

}  // namespace mfginv
