// SPDX-License-Identifier: Apache-2.0
#include "mfginv/spectral.hpp"

#include <cmath>
#include <numbers>

#include "fft.hpp"

namespace mfginv {

using cplx = std::complex<double>;
namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPi2 = 4.0 * std::numbers::pi * std::numbers::pi;
}  // namespace

FourierSpectrum::FourierSpectrum(SpatialGrid grid, std::vector<cplx> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size())
    throw ValidationError("spectrum: coefficient count does not match grid size");
}

double FourierSpectrum::energy() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return s;
}

FourierSpectrum dft_forward(const ComplexField& f) {
  const auto& g = f.grid();
  std::vector<cplx> data(f.values().begin(), f.values().end());
  detail::fft_inplace(data, g.dim(), g.points_per_axis(), -1);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : data) c *= scale;
  return FourierSpectrum(g, std::move(data));
}

FourierSpectrum dft_forward(const ScalarField& f) {
  const auto& g = f.grid();
  std::vector<cplx> data(f.values().begin(), f.values().end());
  detail::fft_inplace(data, g.dim(), g.points_per_axis(), -1);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : data) c *= scale;
  return FourierSpectrum(g, std::move(data));
}

ComplexField dft_inverse(const FourierSpectrum& s) {
  const auto& g = s.grid();
  std::vector<cplx> data(s.coefficients().begin(), s.coefficients().end());
  detail::fft_inplace(data, g.dim(), g.points_per_axis(), +1);
  return ComplexField(g, std::move(data));
}

ScalarField dft_inverse_real(const FourierSpectrum& s, double* imag_residue) {
  const ComplexField c = dft_inverse(s);
  ScalarField out(s.grid());
  double resid = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    out[i] = c[i].real();
    resid = std::max(resid, std::abs(c[i].imag()));
  }
  if (imag_residue) *imag_residue = resid;
  return out;
}

double derivative_wavenumber(const SpatialGrid& grid, std::size_t flat, int axis) {
  const int k = grid.frequency(flat)[axis];
  return k == -grid.points_per_axis() / 2 ? 0.0 : static_cast<double>(k);
}

VectorField spectral_gradient(const ScalarField& f) { return spectral_gradient(dft_forward(f)); }

VectorField spectral_gradient(const FourierSpectrum& fh) {
  const auto& g = fh.grid();
  VectorField out;
  out.reserve(static_cast<std::size_t>(g.dim()));
  for (int j = 0; j < g.dim(); ++j) {
    FourierSpectrum d(g);
    for (std::size_t i = 0; i < g.size(); ++i)
      d[i] = cplx(0.0, kTwoPi * derivative_wavenumber(g, i, j)) * fh[i];
    out.push_back(dft_inverse_real(d));
  }
  return out;
}

ScalarField spectral_divergence(std::span<const ScalarField> v) {
  if (v.empty()) throw ValidationError("divergence: empty vector field");
  const auto& g = v.front().grid();
  if (static_cast<int>(v.size()) != g.dim())
    throw ValidationError("divergence: component count does not match dimension");
  FourierSpectrum acc(g);
  for (int j = 0; j < g.dim(); ++j) {
    require_same_grid(g, v[static_cast<std::size_t>(j)].grid(), "divergence");
    const FourierSpectrum vh = dft_forward(v[static_cast<std::size_t>(j)]);
    for (std::size_t i = 0; i < g.size(); ++i)
      acc[i] += cplx(0.0, kTwoPi * derivative_wavenumber(g, i, j)) * vh[i];
  }
  return dft_inverse_real(acc);
}

ScalarField spectral_laplacian(const ScalarField& f) {
  const auto& g = f.grid();
  FourierSpectrum fh = dft_forward(f);
  for (std::size_t i = 0; i < g.size(); ++i)
    fh[i] *= -kFourPi2 * static_cast<double>(norm2(g.frequency(i)));
  return dft_inverse_real(fh);
}

double heat_factor(double rate, double tau) { return std::exp(-kFourPi2 * rate * tau); }

FourierSpectrum heat_propagate(const FourierSpectrum& s, double tau) {
  if (!(tau >= 0.0)) throw ValidationError("heat_propagate: tau must be nonnegative");
  FourierSpectrum out = s;
  if (tau == 0.0) return out;
  const auto& g = s.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] *= heat_factor(static_cast<double>(norm2(g.frequency(i))), tau);
  return out;
}

ScalarField heat_propagate(const ScalarField& f, double tau) {
  if (!(tau >= 0.0)) throw ValidationError("heat_propagate: tau must be nonnegative");
  if (tau == 0.0) return f;
  return dft_inverse_real(heat_propagate(dft_forward(f), tau));
}

void dealias_two_thirds(FourierSpectrum& s) {
  const auto& g = s.grid();
  const int n = g.points_per_axis();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Wavevector xi = g.frequency(i);
    for (int j = 0; j < g.dim(); ++j)
      if (3 * std::abs(xi[j]) > n) {
        s[i] = 0.0;
        break;
      }
  }
}

ScalarField dealias_two_thirds(const ScalarField& f) {
  FourierSpectrum s = dft_forward(f);
  dealias_two_thirds(s);
  return dft_inverse_real(s);
}

}  // namespace mfginv
