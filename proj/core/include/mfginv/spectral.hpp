// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mfginv/field.hpp"

namespace mfginv {

/// Fourier coefficients phi_hat(xi) = int_T^n phi(x) exp(-2 pi i xi.x) dx of a
/// grid field, stored in wrap-around order (same layout as the grid).
class FourierSpectrum {
 public:
  explicit FourierSpectrum(SpatialGrid grid)
      : grid_(grid), coeffs_(grid.size(), std::complex<double>{}) {}
  FourierSpectrum(SpatialGrid grid, std::vector<std::complex<double>> coeffs);

  const SpatialGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  std::complex<double>& operator[](std::size_t i) { return coeffs_[i]; }
  const std::complex<double>& operator[](std::size_t i) const { return coeffs_[i]; }
  std::complex<double>& at(const Wavevector& xi) { return coeffs_[grid_.spectral_index(xi)]; }
  const std::complex<double>& at(const Wavevector& xi) const {
    return coeffs_[grid_.spectral_index(xi)];
  }
  Wavevector frequency(std::size_t i) const { return grid_.frequency(i); }

  std::span<std::complex<double>> coefficients() noexcept { return coeffs_; }
  std::span<const std::complex<double>> coefficients() const noexcept { return coeffs_; }

  /// Sum of |coeff|^2, which equals the mean square of the spatial field.
  double energy() const;

 private:
  SpatialGrid grid_;
  std::vector<std::complex<double>> coeffs_;
};

FourierSpectrum dft_forward(const ScalarField& f);
FourierSpectrum dft_forward(const ComplexField& f);
ComplexField dft_inverse(const FourierSpectrum& s);
/// Inverse transform keeping the real part; `imag_residue`, if given,
/// receives the sup norm of the discarded imaginary part.
ScalarField dft_inverse_real(const FourierSpectrum& s, double* imag_residue = nullptr);

/// Component j is the inverse transform of (2 pi i xi_j) f_hat. The unpaired
/// Nyquist wavenumber has no real derivative and is dropped.
VectorField spectral_gradient(const ScalarField& f);
VectorField spectral_gradient(const FourierSpectrum& f_hat);
ScalarField spectral_divergence(std::span<const ScalarField> v);
/// Full symbol -4 pi^2 |xi|^2 (Nyquist modes included).
ScalarField spectral_laplacian(const ScalarField& f);

/// Multiplies each coefficient by exp(-4 pi^2 |xi|^2 tau); tau < 0 is rejected.
ScalarField heat_propagate(const ScalarField& f, double tau);
FourierSpectrum heat_propagate(const FourierSpectrum& s, double tau);

/// Zeroes every mode with some |xi_j| > N/3 (2/3 rule).
ScalarField dealias_two_thirds(const ScalarField& f);
void dealias_two_thirds(FourierSpectrum& s);

/// Heat-flow symbol exp(-4 pi^2 k tau) for a generic rate k = |xi|^2 (+ extra).
double heat_factor(double rate, double tau);

/// Derivative wavenumber used by spectral_gradient: xi_j, except 0 on the Nyquist line.
double derivative_wavenumber(const SpatialGrid& grid, std::size_t flat, int axis);

}  // namespace mfginv
