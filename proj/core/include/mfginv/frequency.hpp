// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mfginv/grid.hpp"

namespace mfginv {

/// c(K) = int_0^T exp(-4 pi^2 K s) ds = (1 - e^{-4 pi^2 K T}) / (4 pi^2 K), c(0) = T.
double duhamel_weight(double K, double T);

/// int_0^T exp(-lambda s) cos(p pi s / T) ds.
double cosine_moment(double lambda, int p, double T);

/// int_0^h exp(-lambda s) ds and int_0^h exp(-lambda s) s ds without cancellation.
double exp_integral0(double lambda, double h);
double exp_integral1(double lambda, double h);

/// Every xi in Z^dim with |xi|_inf <= cutoff, ordered by |xi|^2 then lexicographically.
std::vector<Wavevector> frequency_box(int dim, int cutoff);

struct FrequencyDecomposition {
  Wavevector xi1, xi2;    // xi = xi1 + xi2
  Wavevector xi1p, xi2p;  // xi = xi1p + xi2p
  long S = 0;             // |xi1|^2 + |xi2|^2
  long Sp = 0;            // |xi1p|^2 + |xi2p|^2, != S
};

/// Two splits of xi along the first axis, xi2 = -k e1, xi1 = xi + k e1, with
/// the smallest k >= 1 giving xi1 != 0 and the next k with a different sum.
/// For xi_1 > 0 the sign of k is flipped, so xi and -xi have the same sums.
FrequencyDecomposition decompose_frequency(const Wavevector& xi, int dim);

/// Checks the four conditions: all nonzero, both sums equal xi, S != Sp.
bool decomposition_valid(const Wavevector& xi, const FrequencyDecomposition& d);

}  // namespace mfginv
