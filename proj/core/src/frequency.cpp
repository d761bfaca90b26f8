// SPDX-License-Identifier: Apache-2.0
#include "mfginv/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfginv/errors.hpp"

namespace mfginv {

namespace {
constexpr double kFourPi2 = 4.0 * std::numbers::pi * std::numbers::pi;
}

double duhamel_weight(double K, double T) {
  if (K == 0.0) return T;
  const double lam = kFourPi2 * K;
  return -std::expm1(-lam * T) / lam;
}

double cosine_moment(double lambda, int p, double T) {
  const double omega = p * std::numbers::pi / T;
  if (p == 0) return lambda == 0.0 ? T : -std::expm1(-lambda * T) / lambda;
  const double sign = (p % 2 == 0) ? 1.0 : -1.0;
  return lambda * (1.0 - sign * std::exp(-lambda * T)) / (lambda * lambda + omega * omega);
}

double exp_integral0(double lambda, double h) {
  const double x = lambda * h;
  if (x == 0.0) return h;
  return -std::expm1(-x) / lambda;
}

double exp_integral1(double lambda, double h) {
  const double x = lambda * h;
  // h^2 g(x), g(x) = (1 - e^{-x}(1 + x)) / x^2
  double g;
  if (std::abs(x) < 0.1) {
    // sum_{k>=2} (-1)^k (k-1) x^{k-2} / k!
    g = 0.0;
    double term = 0.5;  // k = 2
    double fact = 2.0;
    double xp = 1.0;
    for (int k = 2; k <= 16; ++k) {
      term = ((k % 2) ? -1.0 : 1.0) * (k - 1) * xp / fact;
      g += term;
      xp *= x;
      fact *= (k + 1);
    }
  } else {
    g = (-std::expm1(-x) - x * std::exp(-x)) / (x * x);
  }
  return h * h * g;
}

std::vector<Wavevector> frequency_box(int dim, int cutoff) {
  if (dim < 1 || dim > kMaxDim) throw ValidationError("frequency_box: bad dimension");
  if (cutoff < 0) throw ValidationError("frequency_box: cutoff must be >= 0");
  std::vector<Wavevector> out;
  const int lo1 = dim > 1 ? -cutoff : 0, hi1 = dim > 1 ? cutoff : 0;
  const int lo2 = dim > 2 ? -cutoff : 0, hi2 = dim > 2 ? cutoff : 0;
  for (int a = -cutoff; a <= cutoff; ++a)
    for (int b = lo1; b <= hi1; ++b)
      for (int c = lo2; c <= hi2; ++c) out.push_back({a, b, c});
  std::sort(out.begin(), out.end(), [](const Wavevector& x, const Wavevector& y) {
    const long nx = norm2(x), ny = norm2(y);
    return nx != ny ? nx < ny : x < y;
  });
  return out;
}

FrequencyDecomposition decompose_frequency(const Wavevector& xi, int dim) {
  if (dim < 1 || dim > kMaxDim) throw ValidationError("decompose_frequency: bad dimension");
  FrequencyDecomposition d;
  // Shift toward the origin so |xi1| shrinks; this keeps S(xi) = S(-xi).
  const int sg = xi[0] > 0 ? -1 : 1;
  int k = 1;
  for (;; ++k) {
    const Wavevector a{xi[0] + sg * k, xi[1], xi[2]};
    if (!is_zero(a)) {
      d.xi1 = a;
      d.xi2 = {-sg * k, 0, 0};
      d.S = norm2(a) + static_cast<long>(k) * k;
      break;
    }
  }
  for (int kp = k + 1;; ++kp) {
    const Wavevector a{xi[0] + sg * kp, xi[1], xi[2]};
    const long s = norm2(a) + static_cast<long>(kp) * kp;
    if (!is_zero(a) && s != d.S) {
      d.xi1p = a;
      d.xi2p = {-sg * kp, 0, 0};
      d.Sp = s;
      break;
    }
  }
  return d;
}

bool decomposition_valid(const Wavevector& xi, const FrequencyDecomposition& d) {
  const bool nonzero = !is_zero(d.xi1) && !is_zero(d.xi2) && !is_zero(d.xi1p) && !is_zero(d.xi2p);
  const bool sums = d.xi1 + d.xi2 == xi && d.xi1p + d.xi2p == xi;
  const bool distinct = norm2(d.xi1) + norm2(d.xi2) != norm2(d.xi1p) + norm2(d.xi2p);
  return nonzero && sums && distinct;
}

}  // namespace mfginv
