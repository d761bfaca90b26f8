// SPDX-License-Identifier: Apache-2.0
#include "mfginv/hamiltonian.hpp"

#include <algorithm>
#include <functional>

#include "mfginv/errors.hpp"

namespace mfginv {
namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double beta_factorial(const MultiIndex& b) { return factorial(b[0]) * factorial(b[1]) * factorial(b[2]); }

void check_components(const HamiltonianSeries& h, std::size_t count) {
  if (static_cast<int>(count) != h.dim())
    throw ValidationError("hamiltonian: expected " + std::to_string(h.dim()) +
                          " momentum components, got " + std::to_string(count));
}

// Position of beta in storage order (key for sorting).
std::pair<int, std::array<int, 3>> storage_key(const MultiIndex& b) {
  return {degree(b), {-b[0], -b[1], -b[2]}};
}

}  // namespace

std::vector<MultiIndex> graded_multi_indices(int dim, int order) {
  std::vector<MultiIndex> out;
  for (int d = 1; d <= order; ++d) {
    for (int a = d; a >= 0; --a) {
      if (dim == 1) {
        if (a == d) out.push_back({a, 0, 0});
        continue;
      }
      for (int b = d - a; b >= 0; --b) {
        const int c = d - a - b;
        if (dim == 2 && c != 0) continue;
        out.push_back({a, b, c});
      }
    }
  }
  return out;
}

HamiltonianSeries HamiltonianSeries::quadratic(const SpatialGrid& grid) {
  HamiltonianSeries h(grid);
  h.quadratic_ = true;
  h.order_ = 2;
  return h;
}

HamiltonianSeries HamiltonianSeries::quadratic_as_series(const SpatialGrid& grid) {
  std::vector<Term> terms;
  for (int j = 0; j < grid.dim(); ++j) {
    MultiIndex b{0, 0, 0};
    b[j] = 2;
    terms.push_back({b, ScalarField::constant(grid, 1.0)});
  }
  return from_terms(grid, 2, std::move(terms));
}

HamiltonianSeries HamiltonianSeries::from_terms(const SpatialGrid& grid, int order,
                                                std::vector<Term> terms) {
  if (order < 1) throw ValidationError("hamiltonian: order must be >= 1");
  HamiltonianSeries h(grid);
  h.order_ = order;
  for (const auto& t : terms) {
    require_same_grid(grid, t.coeff.grid(), "hamiltonian term");
    const int d = degree(t.beta);
    if (d < 1 || d > order) throw ValidationError("hamiltonian: |beta| must lie in [1, order]");
    for (int j = 0; j < 3; ++j) {
      if (t.beta[j] < 0) throw ValidationError("hamiltonian: negative multi-index entry");
      if (j >= grid.dim() && t.beta[j] != 0)
        throw ValidationError("hamiltonian: multi-index exceeds dimension");
    }
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return storage_key(a.beta) < storage_key(b.beta);
  });
  for (std::size_t i = 1; i < terms.size(); ++i)
    if (terms[i].beta == terms[i - 1].beta)
      throw ValidationError("hamiltonian: duplicate multi-index");
  h.terms_ = std::move(terms);
  return h;
}

const ScalarField* HamiltonianSeries::coefficient(const MultiIndex& beta) const {
  for (const auto& t : terms_)
    if (t.beta == beta) return &t.coeff;
  return nullptr;
}

ScalarField hamiltonian_eval(const HamiltonianSeries& h, std::span<const ScalarField> p) {
  check_components(h, p.size());
  ScalarField out(h.grid());
  if (h.quadratic_flag()) {
    for (const auto& pj : p)
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += 0.5 * pj[i] * pj[i];
    return out;
  }
  for (const auto& t : h.terms()) {
    const double inv = 1.0 / beta_factorial(t.beta);
    for (std::size_t i = 0; i < out.size(); ++i) {
      double mono = t.coeff[i] * inv;
      for (int j = 0; j < h.dim(); ++j)
        for (int e = 0; e < t.beta[j]; ++e) mono *= p[static_cast<std::size_t>(j)][i];
      out[i] += mono;
    }
  }
  return out;
}

VectorField hamiltonian_grad(const HamiltonianSeries& h, std::span<const ScalarField> p) {
  check_components(h, p.size());
  if (h.quadratic_flag()) return VectorField(p.begin(), p.end());
  VectorField out(static_cast<std::size_t>(h.dim()), ScalarField(h.grid()));
  for (const auto& t : h.terms()) {
    const double inv = 1.0 / beta_factorial(t.beta);
    for (int j = 0; j < h.dim(); ++j) {
      if (t.beta[j] == 0) continue;
      MultiIndex r = t.beta;
      r[j] -= 1;
      const double scale = t.beta[j] * inv;
      auto& g = out[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < g.size(); ++i) {
        double mono = t.coeff[i] * scale;
        for (int l = 0; l < h.dim(); ++l)
          for (int e = 0; e < r[l]; ++e) mono *= p[static_cast<std::size_t>(l)][i];
        g[i] += mono;
      }
    }
  }
  return out;
}

LinearizationCoeffs extract_linearization_coeffs(const HamiltonianSeries& h) {
  const int n = h.dim();
  LinearizationCoeffs c;
  c.a1.assign(static_cast<std::size_t>(n), ScalarField(h.grid()));
  c.b1.assign(static_cast<std::size_t>(n),
              std::vector<ScalarField>(static_cast<std::size_t>(n), ScalarField(h.grid())));
  if (h.quadratic_flag()) {
    for (int j = 0; j < n; ++j)
      c.b1[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] =
          ScalarField::constant(h.grid(), 1.0);
    return c;
  }
  for (int i = 0; i < n; ++i) {
    MultiIndex e{0, 0, 0};
    e[i] = 1;
    if (auto* f = h.coefficient(e)) c.a1[static_cast<std::size_t>(i)] = *f;
    for (int j = 0; j < n; ++j) {
      MultiIndex b = e;
      b[j] += 1;
      if (auto* f = h.coefficient(b))
        c.b1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = *f;
    }
  }
  return c;
}

namespace {

// Sum over index tuples (lead, i_1..i_r) of H^{e_lead + sum e_ik} prod v_k,i_k.
// lead < 0 means no leading direction.
ScalarField multilinear_impl(const HamiltonianSeries& h, std::span<const VectorField* const> vs,
                             int lead) {
  const int n = h.dim();
  const std::size_t r = vs.size();
  for (const auto* v : vs) check_components(h, v->size());
  ScalarField out(h.grid());
  const int total = static_cast<int>(r) + (lead >= 0 ? 1 : 0);
  if (total == 0 || total > h.order()) return out;

  if (h.quadratic_flag()) {
    // Only the second derivative (identity) is nonzero.
    if (total != 2) return out;
    if (lead >= 0) return (*vs[0])[static_cast<std::size_t>(lead)];
    for (int j = 0; j < n; ++j)
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] += (*vs[0])[static_cast<std::size_t>(j)][i] * (*vs[1])[static_cast<std::size_t>(j)][i];
    return out;
  }

  std::vector<int> idx(r, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == r) {
      MultiIndex beta{0, 0, 0};
      if (lead >= 0) beta[lead] += 1;
      for (int i : idx) beta[i] += 1;
      const ScalarField* c = h.coefficient(beta);
      if (!c) return;
      for (std::size_t p = 0; p < out.size(); ++p) {
        double v = (*c)[p];
        for (std::size_t q = 0; q < r; ++q) v *= (*vs[q])[static_cast<std::size_t>(idx[q])][p];
        out[p] += v;
      }
      return;
    }
    for (int i = 0; i < n; ++i) {
      idx[k] = i;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace

ScalarField hamiltonian_multilinear(const HamiltonianSeries& h,
                                    std::span<const VectorField* const> vs) {
  return multilinear_impl(h, vs, -1);
}

VectorField hamiltonian_grad_multilinear(const HamiltonianSeries& h,
                                         std::span<const VectorField* const> vs) {
  VectorField out;
  for (int j = 0; j < h.dim(); ++j) out.push_back(multilinear_impl(h, vs, j));
  return out;
}

}  // namespace mfginv
