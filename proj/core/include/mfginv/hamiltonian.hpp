// SPDX-License-Identifier: Apache-2.0
//
// H(x,p) = sum_{1<=|beta|<=K} H^beta(x) p^beta / beta!, with H^beta = d^beta_p H(x,0).
//
// Multi-indices are stored graded: by total degree ascending, then
// lexicographically descending within a degree. For n = 2, K = 2 that is
// (1,0), (0,1), (2,0), (1,1), (0,2).
#pragma once

#include <span>
#include <vector>

#include "mfginv/field.hpp"

namespace mfginv {

using MultiIndex = std::array<int, 3>;

inline int degree(const MultiIndex& b) { return b[0] + b[1] + b[2]; }

/// All multi-indices with 1 <= |beta| <= order in storage order.
std::vector<MultiIndex> graded_multi_indices(int dim, int order);

class HamiltonianSeries {
 public:
  struct Term {
    MultiIndex beta;
    ScalarField coeff;
  };

  /// H = |p|^2 / 2, evaluated by a dedicated path.
  static HamiltonianSeries quadratic(const SpatialGrid& grid);
  /// Terms may come in any order and may be sparse; they are sorted into
  /// storage order and duplicates are rejected.
  static HamiltonianSeries from_terms(const SpatialGrid& grid, int order, std::vector<Term> terms);
  /// The series encoding of |p|^2 / 2 (unit coefficients on 2 e_j), flag off.
  static HamiltonianSeries quadratic_as_series(const SpatialGrid& grid);

  bool quadratic_flag() const noexcept { return quadratic_; }
  int order() const noexcept { return order_; }
  const SpatialGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.dim(); }
  std::span<const Term> terms() const noexcept { return terms_; }
  /// nullptr when the coefficient is absent (zero).
  const ScalarField* coefficient(const MultiIndex& beta) const;

 private:
  explicit HamiltonianSeries(SpatialGrid grid) : grid_(grid) {}

  SpatialGrid grid_;
  bool quadratic_ = false;
  int order_ = 2;
  std::vector<Term> terms_;
};

ScalarField hamiltonian_eval(const HamiltonianSeries& h, std::span<const ScalarField> p);
VectorField hamiltonian_grad(const HamiltonianSeries& h, std::span<const ScalarField> p);

struct LinearizationCoeffs {
  VectorField a1;                      // A1_j = H^{e_j}
  std::vector<std::vector<ScalarField>> b1;  // B1_ij = H^{e_i + e_j}
};

LinearizationCoeffs extract_linearization_coeffs(const HamiltonianSeries& h);

/// D^r_p H(x,0)[v_1, ..., v_r] = sum_{i_1..i_r} H^{e_i1+...+e_ir} prod_k v_k,i_k.
ScalarField hamiltonian_multilinear(const HamiltonianSeries& h,
                                    std::span<const VectorField* const> vs);
/// Component j: D^{r+1}_p H(x,0)[e_j, v_1, ..., v_r].
VectorField hamiltonian_grad_multilinear(const HamiltonianSeries& h,
                                         std::span<const VectorField* const> vs);

}  // namespace mfginv
