// SPDX-License-Identifier: Apache-2.0
#include "mfginv/parabolic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "mfginv/errors.hpp"

namespace mfginv {

using cplx = std::complex<double>;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^z - 1 without cancellation in the real part.
cplx expm1_complex(cplx z) {
  const double a = z.real(), b = z.imag();
  const double s = std::sin(0.5 * b);
  const double re = std::expm1(a) * std::cos(b) - 2.0 * s * s;
  const double im = std::exp(a) * std::sin(b);
  return {re, im};
}

cplx phi1(cplx z) { return z == cplx(0.0, 0.0) ? cplx(1.0, 0.0) : expm1_complex(z) / z; }

int t_index_of(Direction dir, int march, int steps) {
  return dir == Direction::Forward ? march : steps - march;
}

void require_finite(const ScalarField& w, int step, double t) {
  if (!w.all_finite())
    throw DivergenceError("parabolic solve produced non-finite values at step " +
                              std::to_string(step) + " (t = " + std::to_string(t) + ")",
                          step, t);
}

}  // namespace

ExponentialStepper::ExponentialStepper(const SpatialGrid& grid, double dt,
                                       const std::array<double, 3>& bbar)
    : grid_(grid), dt_(dt), expo_(grid.size()), phi_(grid.size()) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double drift = 0.0;
    for (int j = 0; j < grid.dim(); ++j) drift += derivative_wavenumber(grid, i, j) * bbar[j];
    const cplx z = cplx(-4.0 * std::numbers::pi * std::numbers::pi *
                            static_cast<double>(norm2(grid.frequency(i))),
                        kTwoPi * drift) *
                   dt;
    expo_[i] = std::exp(z);
    phi_[i] = dt * phi1(z);
  }
}

void ExponentialStepper::step(FourierSpectrum& w_hat, const FourierSpectrum& n_hat) const {
  for (std::size_t i = 0; i < w_hat.size(); ++i) w_hat[i] = expo_[i] * w_hat[i] + phi_[i] * n_hat[i];
}

void ExplicitAccumulator::clear() {
  for (auto& c : n_hat_.coefficients()) c = 0.0;
}

void ExplicitAccumulator::add_scalar(const ScalarField& f) {
  FourierSpectrum fh = dft_forward(f);
  if (dealias_) dealias_two_thirds(fh);
  for (std::size_t i = 0; i < fh.size(); ++i) n_hat_[i] += fh[i];
}

void ExplicitAccumulator::add_divergence(const VectorField& flux) {
  const auto& g = n_hat_.grid();
  if (static_cast<int>(flux.size()) != g.dim())
    throw ValidationError("divergence flux: component count does not match dimension");
  for (int j = 0; j < g.dim(); ++j) {
    FourierSpectrum fh = dft_forward(flux[static_cast<std::size_t>(j)]);
    if (dealias_) dealias_two_thirds(fh);
    for (std::size_t i = 0; i < fh.size(); ++i)
      n_hat_[i] += cplx(0.0, kTwoPi * derivative_wavenumber(g, i, j)) * fh[i];
  }
}

SpaceTimeField exponential_march(const SpatialGrid& grid, const TimeGrid& time, Direction dir,
                                 const ScalarField& data, const std::array<double, 3>& bbar,
                                 bool dealias, const ExplicitTerm& term) {
  require_same_grid(grid, data.grid(), "parabolic data");
  const int steps = time.steps();
  const ExponentialStepper stepper(grid, time.dt(), bbar);
  ExplicitAccumulator acc(grid, dealias);
  SpaceTimeField out(grid, time);

  ScalarField w = data;
  FourierSpectrum w_hat = dft_forward(w);
  out.set_slice(t_index_of(dir, 0, steps), w);
  for (int j = 0; j < steps; ++j) {
    acc.clear();
    if (term) term(t_index_of(dir, j, steps), w, w_hat, acc);
    stepper.step(w_hat, acc.spectrum());
    w = dft_inverse_real(w_hat);
    const int k = t_index_of(dir, j + 1, steps);
    require_finite(w, j + 1, time.node(k));
    out.set_slice(k, w);
  }
  return out;
}

StencilDefect exponential_defect(const SpaceTimeField& w, Direction dir,
                          const std::array<double, 3>& bbar, bool dealias,
                          const ExplicitTerm& term) {
  const auto& grid = w.grid();
  const int steps = w.time().steps();
  const ExponentialStepper stepper(grid, w.time().dt(), bbar);
  ExplicitAccumulator acc(grid, dealias);
  StencilDefect defect;
  double sq = 0.0;
  for (int j = 0; j < steps; ++j) {
    const int k0 = t_index_of(dir, j, steps);
    const ScalarField w0 = w.slice(k0);
    FourierSpectrum w_hat = dft_forward(w0);
    acc.clear();
    if (term) term(k0, w0, w_hat, acc);
    stepper.step(w_hat, acc.spectrum());
    const ScalarField pred = dft_inverse_real(w_hat);
    const auto next = w.slice_span(t_index_of(dir, j + 1, steps));
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double d = pred[i] - next[i];
      defect.sup = std::max(defect.sup, std::abs(d));
      sq += d * d;
    }
  }
  defect.l2 = std::sqrt(sq / (static_cast<double>(steps) * static_cast<double>(grid.size())));
  return defect;
}

ExplicitTerm explicit_term(const ParabolicProblem& p) {
  return [&p](int k, const ScalarField& w, const FourierSpectrum& w_hat, ExplicitAccumulator& acc) {
    const auto& g = w.grid();
    ScalarField scalar(g);
    bool have_scalar = false;
    if (!p.drift.empty()) {
      if (p.drift_form == DriftForm::Divergence) {
        VectorField flux;
        for (const auto& b : p.drift) {
          ScalarField f = w;
          const auto bs = b.slice_span(k);
          for (std::size_t i = 0; i < f.size(); ++i) f[i] *= bs[i];
          flux.push_back(std::move(f));
        }
        acc.add_divergence(flux);
      } else {
        const VectorField grad = spectral_gradient(w_hat);
        for (std::size_t j = 0; j < p.drift.size(); ++j) {
          const auto bs = p.drift[j].slice_span(k);
          for (std::size_t i = 0; i < scalar.size(); ++i) scalar[i] += bs[i] * grad[j][i];
        }
        have_scalar = true;
      }
    }
    if (p.potential) {
      const auto c = p.potential->slice_span(k);
      if (p.coupling) {
        const auto z = p.coupling->slice_span(k);
        for (std::size_t i = 0; i < scalar.size(); ++i) scalar[i] += c[i] * z[i];
      } else {
        for (std::size_t i = 0; i < scalar.size(); ++i) scalar[i] += c[i] * w[i];
      }
      have_scalar = true;
    }
    if (p.source) {
      const auto s = p.source->slice_span(k);
      for (std::size_t i = 0; i < scalar.size(); ++i) scalar[i] += s[i];
      have_scalar = true;
    }
    if (have_scalar) acc.add_scalar(scalar);
  };
}

namespace {

void validate(const ParabolicProblem& p) {
  const auto& g = p.data.grid();
  if (!p.data.all_finite()) throw ValidationError("parabolic: data contains non-finite values");
  if (!p.drift.empty() && static_cast<int>(p.drift.size()) != g.dim())
    throw ValidationError("parabolic: drift must have one component per dimension");
  auto check = [&](const SpaceTimeField& f, const char* what) {
    require_same_grid(g, f.grid(), what);
    if (!(f.time() == p.time)) throw ValidationError(std::string(what) + ": time grid mismatch");
  };
  for (const auto& b : p.drift) check(b, "parabolic drift");
  if (p.potential) check(*p.potential, "parabolic potential");
  if (p.coupling) {
    if (!p.potential) throw ValidationError("parabolic: coupling given without a potential");
    check(*p.coupling, "parabolic coupling");
  }
  if (p.source) check(*p.source, "parabolic source");
}

}  // namespace

double stability_limit(const ParabolicProblem& p) {
  double bmax2 = 0.0;
  if (!p.drift.empty()) {
    const std::size_t total = p.drift.front().values().size();
    for (std::size_t i = 0; i < total; ++i) {
      double s = 0.0;
      for (const auto& b : p.drift) s += b.values()[i] * b.values()[i];
      bmax2 = std::max(bmax2, s);
    }
  }
  double limit = bmax2 > 0.0 ? 1.0 / bmax2 : std::numeric_limits<double>::infinity();
  if (p.potential && !p.coupling) {
    const double c = p.potential->sup_norm();
    if (c > 0.0) limit = std::min(limit, 1.0 / c);
  }
  return limit;
}

ParabolicSolution solve_parabolic(const ParabolicProblem& p) {
  validate(p);
  const double limit = stability_limit(p);
  if (p.time.dt() > limit)
    throw StabilityError("parabolic: dt = " + std::to_string(p.time.dt()) +
                             " exceeds the explicit-term bound " + std::to_string(limit),
                         limit);
  const ExplicitTerm term = explicit_term(p);
  ParabolicSolution out{exponential_march(p.data.grid(), p.time, p.direction, p.data,
                                          p.constant_drift, p.dealias, term),
                        0.0};
  out.defect = exponential_defect(out.w, p.direction, p.constant_drift, p.dealias, term).sup;
  return out;
}

DuhamelOrder1 duhamel_solve_order1(const ScalarField& f1, const SpaceTimeField& F1,
                                   const ScalarField& G1) {
  const auto& g = f1.grid();
  require_same_grid(g, F1.grid(), "duhamel F1");
  require_same_grid(g, G1.grid(), "duhamel G1");
  const TimeGrid& time = F1.time();
  const FourierSpectrum f_hat = dft_forward(f1);
  SpaceTimeField m1(g, time);
  FourierSpectrum acc(g);
  const double dt = time.dt();
  for (int k = 0; k < time.nodes(); ++k) {
    const double s = time.node(k);
    const ScalarField mk = dft_inverse_real(heat_propagate(f_hat, s));
    m1.set_slice(k, mk);
    const double w = (k == 0 || k == time.steps()) ? 0.5 * dt : dt;
    const FourierSpectrum src = heat_propagate(dft_forward(pointwise_product(F1.slice(k), mk)), s);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * src[i];
  }
  const double horizon = time.horizon();
  const FourierSpectrum term =
      heat_propagate(dft_forward(pointwise_product(G1, m1.slice(time.steps()))), horizon);
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += term[i];
  return {dft_inverse_real(acc), std::move(m1)};
}

DuhamelOrder1 duhamel_solve_order1(const ScalarField& f1, const ScalarField& F1_static,
                                   const ScalarField& G1, const TimeGrid& time) {
  SpaceTimeField F1(f1.grid(), time);
  for (int k = 0; k < time.nodes(); ++k) F1.set_slice(k, F1_static);
  return duhamel_solve_order1(f1, F1, G1);
}

double general_kernel_positivity_probe(const VectorField& A, double t, int trials, int steps) {
  if (A.empty()) throw ValidationError("positivity probe: empty drift field");
  if (!(t > 0.0)) throw ValidationError("positivity probe: t must be positive");
  if (trials < 1) throw ValidationError("positivity probe: trials must be >= 1");
  const SpatialGrid grid = A.front().grid();
  const int n = grid.dim();
  if (static_cast<int>(A.size()) != n)
    throw ValidationError("positivity probe: drift must have one component per dimension");

  const TimeGrid time(t, steps);
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  for (int j = 0; j < n; ++j) mean[j] = A[static_cast<std::size_t>(j)].mean();

  double minimum = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    const double sigma = 0.06 + 0.03 * (trial % 3);
    std::array<double, 3> centre{};
    for (int j = 0; j < n; ++j)
      centre[j] = std::fmod((trial + 0.5) / trials + 0.618033988749895 * j, 1.0);
    ScalarField bump = ScalarField::sample(grid, [&](const std::array<double, 3>& x) {
      double v = 1.0;
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = -2; k <= 2; ++k) {
          const double d = x[j] - centre[j] + k;
          s += std::exp(-d * d / (2.0 * sigma * sigma));
        }
        v *= s;
      }
      return v;
    });

    // d_t w - Lap w + A . grad w = 0, i.e. nondivergence drift b = -A.
    ParabolicProblem p(bump, time);
    p.drift_form = DriftForm::Nondivergence;
    for (int j = 0; j < n; ++j) p.constant_drift[j] = -mean[j];
    for (int j = 0; j < n; ++j) {
      ScalarField var = A[static_cast<std::size_t>(j)];
      for (auto& v : var.values()) v = -(v - mean[j]);
      SpaceTimeField b(grid, time);
      for (int k = 0; k < time.nodes(); ++k) b.set_slice(k, var);
      p.drift.push_back(std::move(b));
    }
    const auto sol = solve_parabolic(p);
    for (double v : sol.w.values()) minimum = std::min(minimum, v);
  }
  return minimum;
}

}  // namespace mfginv
