// SPDX-License-Identifier: Apache-2.0
//
// Operator assembly for Hamiltonians with a nonzero linear part. The order-1
// response is affine in (F1, G1) once m1 is fixed, so we solve for a real
// trigonometric basis column by column and fit in least squares.
#include <Eigen/SVD>

#include <cmath>
#include <numbers>

#include "mfginv/errors.hpp"
#include "mfginv/recovery.hpp"

namespace mfginv {

namespace {

std::vector<ScalarField> trig_basis(const SpatialGrid& grid, int cutoff) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<ScalarField> basis;
  for (const auto& xi : frequency_box(grid.dim(), cutoff)) {
    // One representative per +/- pair: first nonzero component positive.
    int lead = 0;
    for (int j = 0; j < grid.dim() && lead == 0; ++j) lead = xi[j];
    if (lead < 0) continue;
    auto phase = [&](const std::array<double, 3>& x) {
      double p = 0.0;
      for (int j = 0; j < grid.dim(); ++j) p += xi[j] * x[j];
      return two_pi * p;
    };
    basis.push_back(ScalarField::sample(grid, [&](const auto& x) { return std::cos(phase(x)); }));
    if (lead > 0)
      basis.push_back(ScalarField::sample(grid, [&](const auto& x) { return std::sin(phase(x)); }));
  }
  return basis;
}

std::vector<ScalarField> responses(const MfgConfig& cfg, const std::vector<ScalarField>& probes,
                                   const LinearizationOptions& opt) {
  const auto lin = linearize_direct(cfg, probes, 1, opt);
  std::vector<ScalarField> out;
  for (std::size_t p = 0; p < probes.size(); ++p) out.push_back(lin.measurement(1u << p));
  return out;
}

GeneralRecovery fit(const MfgConfig& cfg, const std::vector<ScalarField>& probes,
                    const std::vector<ScalarField>& data, int cutoff, double tikhonov,
                    const LinearizationOptions& opt, bool target_F) {
  if (probes.empty() || probes.size() != data.size())
    throw ValidationError("general recovery: need one measurement per probe");
  const SpatialGrid& grid = cfg.grid();
  if (cutoff < 0 || 2 * cutoff >= grid.points_per_axis())
    throw ValidationError("cutoff: must lie in [0, N/2)");
  const std::size_t n = grid.size();
  const auto zero = ScalarField(grid);

  // Baseline: target coefficient set to zero, the other one kept.
  MfgConfig base = cfg;
  if (target_F)
    base.F = TaylorCost::running_static({zero});
  else
    base.G = TaylorCost::terminal({zero});
  const auto b0 = responses(base, probes, opt);

  const auto basis = trig_basis(grid, cutoff);
  const Eigen::Index rows = static_cast<Eigen::Index>(probes.size() * n);
  const Eigen::Index cols = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (std::size_t p = 0; p < probes.size(); ++p)
    for (std::size_t i = 0; i < n; ++i)
      b(static_cast<Eigen::Index>(p * n + i)) = data[p][i] - b0[p][i];

  for (Eigen::Index c = 0; c < cols; ++c) {
    MfgConfig col = cfg;
    col.F = TaylorCost::running_static({target_F ? basis[static_cast<std::size_t>(c)] : zero});
    col.G = TaylorCost::terminal({target_F ? zero : basis[static_cast<std::size_t>(c)]});
    const auto r = responses(col, probes, opt);
    for (std::size_t p = 0; p < probes.size(); ++p)
      for (std::size_t i = 0; i < n; ++i) A(static_cast<Eigen::Index>(p * n + i), c) = r[p][i];
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  Eigen::VectorXd filt(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double den = s(i) * s(i) + tikhonov;
    filt(i) = den > 0.0 ? s(i) / den : 0.0;
  }
  const Eigen::VectorXd x = svd.matrixV() * filt.cwiseProduct(svd.matrixU().transpose() * b);

  GeneralRecovery out{zero};
  for (Eigen::Index c = 0; c < cols; ++c) out.coefficient.axpy(x(c), basis[static_cast<std::size_t>(c)]);
  out.basis_size = static_cast<int>(cols);
  out.condition = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  out.residual = (A * x - b).norm() / std::sqrt(static_cast<double>(rows));
  return out;
}

}  // namespace

GeneralRecovery recover_F1_general(const MfgConfig& cfg_known_G, const std::vector<ScalarField>& probes,
                                   const std::vector<ScalarField>& data, int cutoff, double tikhonov,
                                   const LinearizationOptions& opt) {
  return fit(cfg_known_G, probes, data, cutoff, tikhonov, opt, true);
}

GeneralRecovery recover_G1_general(const MfgConfig& cfg_known_F, const std::vector<ScalarField>& probes,
                                   const std::vector<ScalarField>& data, int cutoff, double tikhonov,
                                   const LinearizationOptions& opt) {
  return fit(cfg_known_F, probes, data, cutoff, tikhonov, opt, false);
}

}  // namespace mfginv
