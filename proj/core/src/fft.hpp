// SPDX-License-Identifier: Apache-2.0
// Internal FFTW wrapper. Plans are created once per (dim, N, sign) with
// FFTW_ESTIMATE so results do not depend on timing measurements.
#pragma once

#include <complex>
#include <span>

namespace mfginv::detail {

/// Unnormalized n-D transform in place; sign = -1 forward, +1 backward.
void fft_inplace(std::span<std::complex<double>> data, int dim, int n, int sign);

}  // namespace mfginv::detail
