#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "eulerlab/frame.hpp"
#include "eulerlab/integrator.hpp"

namespace eulerlab {

/// Fitted exponential rate of one monitored quantity.
struct DecayReport {
  std::string quantity;
  std::vector<double> times;
  std::vector<double> values;
  double fitted_rate = 0.0;       // decay rate delta in values ~ C e^{-delta t}
  double fitted_prefactor = 0.0;  // C
  double window_t0 = 0.0;
  double window_t1 = 0.0;
  double residual_of_fit = 0.0;   // rms residual of log values
  double k_measured = 0.0;        // optional semigroup constant
};

/// Least-squares slope of log(values) over the window. The envelope variant
/// fits only strict local maxima (3-sample window), for oscillatory series.
inline DecayReport fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                             double window_t0, double window_t1, bool envelope = false,
                             const std::string& quantity = "") {
  if (times.size() != values.size()) throw ShapeMismatch("fit_decay: size mismatch");
  std::vector<double> ts, vs;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window_t0 || times[i] > window_t1) continue;
    if (envelope) {
      if (i == 0 || i + 1 >= values.size()) continue;
      if (!(values[i] > values[i - 1] && values[i] > values[i + 1])) continue;
    }
    ts.push_back(times[i]);
    vs.push_back(values[i]);
  }
  if (ts.size() < (envelope ? 3u : 10u))
    throw NonPositiveSeries("fit_decay: not enough samples in the window");
  for (double v : vs)
    if (!(v > 0.0)) throw NonPositiveSeries("fit_decay: non-positive value in the window");

  double st = 0.0, sv = 0.0, stt = 0.0, stv = 0.0;
  const double n = static_cast<double>(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double lv = std::log(vs[i]);
    st += ts[i];
    sv += lv;
    stt += ts[i] * ts[i];
    stv += ts[i] * lv;
  }
  const double denom = n * stt - st * st;
  if (denom == 0.0) throw NonPositiveSeries("fit_decay: degenerate time window");
  const double slope = (n * stv - st * sv) / denom;
  const double intercept = (sv - slope * st) / n;

  DecayReport rep;
  rep.quantity = quantity;
  rep.times = times;
  rep.values = values;
  rep.fitted_rate = -slope;
  rep.fitted_prefactor = std::exp(intercept);
  rep.window_t0 = window_t0;
  rep.window_t1 = window_t1;
  double rss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = std::log(vs[i]) - (intercept + slope * ts[i]);
    rss += r * r;
  }
  rep.residual_of_fit = std::sqrt(rss / n);
  return rep;
}

/// Integral of rho = (1 + theta sigma)^{1/theta} over the box.
inline double mass_integral(const State& st, const GasParameters& params) {
  const double th = params.theta();
  const auto phys = to_physical(st.sigma);
  double sum = 0.0;
  for (double v : phys) {
    const double base = 1.0 + th * v;
    if (!(base > 0.0)) throw NonPhysicalDensity("mass_integral: 1 + theta sigma <= 0");
    sum += std::pow(base, 1.0 / th);
  }
  return sum / static_cast<double>(phys.size());
}

/// ||f||_{L2} / ||grad f||_{L2}; sharp bound 1/(2 pi) for zero-mean fields.
inline double poincare_ratio(const ScalarField& f) {
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < f.coeffs.size(); ++p) {
    const auto xi = f.grid.xi_of(p);
    const double a2 = std::norm(f.coeffs[p]);
    num += a2;
    den += kTwoPi * kTwoPi * GridSpec::xi_norm2(xi) * a2;
  }
  if (den <= 0.0) throw ZeroGradient("poincare_ratio: constant field");
  return std::sqrt(num / den);
}

inline double hs_inner(const State& a, const State& b, double s, Weight w = Weight::Physical) {
  if (a.grid() != b.grid()) throw GridMismatch("hs_inner: grids differ");
  const GridSpec& g = a.grid();
  double sum = 0.0;
  for (std::size_t p = 0; p < g.total_samples(); ++p) {
    const double wt = sobolev_weight(g.xi_of(p), s, w);
    sum += wt * (std::conj(a.sigma.coeffs[p]) * b.sigma.coeffs[p]).real();
    for (int d = 0; d < g.dim; ++d)
      sum += wt * (std::conj(a.velocity[d].coeffs[p]) * b.velocity[d].coeffs[p]).real();
  }
  return sum;
}

/// <B_{coeff}(arg), arg>_{H^s}, the Prop.-2 dissipativity form.
inline double dissipativity_form(const State& coefficients, const State& argument,
                                 const GasParameters& params, double s) {
  return hs_inner(apply_B(coefficients, argument, params), argument, s);
}

/// Grid sup of all first derivatives, ||D(sigma,U)||_{L-infinity}.
inline double gradient_sup(const State& st) {
  double sup = 0.0;
  for (int axis = 0; axis < st.dim(); ++axis) {
    const auto ds = to_physical(spectral_derivative(st.sigma, axis));
    for (double v : ds) sup = std::max(sup, std::abs(v));
    for (int j = 0; j < st.dim(); ++j) {
      const auto du = to_physical(spectral_derivative(st.velocity[j], axis));
      for (double v : du) sup = std::max(sup, std::abs(v));
    }
  }
  return sup;
}

namespace detail {

// Weighted singular-value estimate of C = S B S^{-1} - B on the Hilbertized
// paper-weight X_s: power iteration on M*M with M = W^{1/2} C W^{-1/2}.
struct CommutatorOperator {
  const State& coeff;
  GasParameters params;
  double s;

  State weight(const State& x, double exponent) const {
    const GridSpec& g = x.grid();
    State out = x;
    for (std::size_t p = 0; p < g.total_samples(); ++p) {
      const double w = std::pow(1.0 + GridSpec::xi_norm2(g.xi_of(p)), exponent);
      out.sigma.coeffs[p] *= w;
      for (int d = 0; d < g.dim; ++d) out.velocity[d].coeffs[p] *= w;
    }
    return out;
  }

  State shift(const State& x, BesselShift dir) const {
    State out = x;
    out.sigma = bessel_shift(x.sigma, dir);
    for (int d = 0; d < x.dim(); ++d) out.velocity[d] = bessel_shift(x.velocity[d], dir);
    return out;
  }

  State apply_m(const State& x) const {
    State y = weight(x, -s / 2.0);
    State c = shift(apply_B(coeff, shift(y, BesselShift::Lower), params), BesselShift::Raise) -
              apply_B(coeff, y, params);
    return weight(c, s / 2.0);
  }

  State apply_mh(const State& x) const {
    State y = weight(x, s / 2.0);
    State c = shift(apply_B_adjoint(coeff, shift(y, BesselShift::Raise), params),
                    BesselShift::Lower) -
              apply_B_adjoint(coeff, y, params);
    return weight(c, -s / 2.0);
  }
};

inline double l2_norm(const State& st) {
  double s = 0.0;
  for (const auto& c : st.sigma.coeffs) s += std::norm(c);
  for (const auto& u : st.velocity)
    for (const auto& c : u.coeffs) s += std::norm(c);
  return std::sqrt(s);
}

}  // namespace detail

/// Estimate of ||S B_{state} S^{-1} - B_{state}|| on the paper-weight X_s by
/// power iteration (30 iterations per probe, relative tolerance 1e-6).
inline double commutator_norm_probe(const State& state, const GasParameters& params, double s,
                                    int n_probes = 8, std::uint64_t seed = 0) {
  if (n_probes < 1) throw Error("commutator_norm_probe: need at least one probe");
  const GridSpec& g = state.grid();
  detail::CommutatorOperator op{state, params, s};
  double best = 0.0;
  for (int probe = 0; probe < n_probes; ++probe) {
    State z = random_state(seed * 1000003ULL + probe + 1, g, s, 1.0, {0.0, -1, false, -1.0});
    double prev = 0.0;
    for (int it = 0; it < 30; ++it) {
      State mz = op.apply_m(z);
      const double num = detail::l2_norm(mz);
      const double den = detail::l2_norm(z);
      if (den == 0.0 || num == 0.0) break;
      const double rq = num / den;
      best = std::max(best, rq);
      if (prev > 0.0 && std::abs(rq - prev) <= 1e-6 * rq) break;
      prev = rq;
      z = op.apply_mh(mz);
      const double zn = detail::l2_norm(z);
      if (zn == 0.0) break;
      z *= 1.0 / zn;
    }
  }
  return best;
}

/// Time series of |c(t)| / (||sigma1||_{s+1} + ||U1||_{s+1}) and its supremum
/// (the measured slaving constant).
inline DecayReport slaving_series(const Trajectory& traj, const std::vector<FrameFunctionals>& frames,
                                  double s) {
  if (traj.states.size() != frames.size())
    throw ShapeMismatch("slaving_series: one frame per trajectory sample required");
  DecayReport rep;
  rep.quantity = "slaving_ratio";
  double sup = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const DecomposedState d = decompose_state(traj.states[i], frames[i]);
    State pair(traj.grid);
    pair.sigma = d.sigma1;
    pair.velocity = d.u1;
    const double denom = sobolev_norm(pair, s + 1.0);
    if (denom <= 0.0) continue;
    any = true;
    rep.times.push_back(traj.times[i]);
    rep.values.push_back(std::abs(d.c) / denom);
    sup = std::max(sup, rep.values.back());
  }
  if (!any) throw DegenerateDenominator("slaving_series: decomposed part vanishes identically");
  rep.fitted_prefactor = sup;  // measured C
  return rep;
}

/// Central-difference residual of the continuity equation in rho variables,
/// max over interior snapshots of ||rho_t + div(rho U)||_{L2} / ||rho U||_{L2}.
inline double continuity_residual(const Trajectory& traj, const GasParameters& params) {
  if (traj.states.size() < 3) throw Error("continuity_residual: need >= 3 snapshots");
  const GridSpec& g = traj.grid;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < traj.states.size(); ++i) {
    ScalarField rho_prev =
        rho_sigma_transform(traj.states[i - 1].sigma, DensityTransform::SigmaToRho, params);
    ScalarField rho_next =
        rho_sigma_transform(traj.states[i + 1].sigma, DensityTransform::SigmaToRho, params);
    ScalarField rho =
        rho_sigma_transform(traj.states[i].sigma, DensityTransform::SigmaToRho, params);
    ScalarField rho_t = (1.0 / (2.0 * traj.dt)) * (rho_next - rho_prev);

    ScalarField residual = rho_t;
    double flux2 = 0.0;
    for (int d = 0; d < g.dim; ++d) {
      ScalarField flux = dealiased_product(rho, traj.states[i].velocity[d]);
      flux2 += std::pow(sobolev_norm(flux, 0.0), 2);
      residual += spectral_derivative(flux, d);
    }
    const double fnorm = std::sqrt(flux2);
    if (fnorm == 0.0) continue;
    worst = std::max(worst, sobolev_norm(residual, 0.0) / fnorm);
  }
  return worst;
}

/// Same Richardson structure for the momentum equation,
/// (rho U)_t + div(rho U (x) U) + grad P + rho U, P = rho^gamma / gamma.
inline double momentum_residual(const Trajectory& traj, const GasParameters& params) {
  if (traj.states.size() < 3) throw Error("momentum_residual: need >= 3 snapshots");
  const GridSpec& g = traj.grid;
  const int dim = g.dim;
  double worst = 0.0;

  auto momentum = [&](const State& st, int j) {
    ScalarField rho = rho_sigma_transform(st.sigma, DensityTransform::SigmaToRho, params);
    return dealiased_product(rho, st.velocity[j]);
  };
  auto pressure = [&](const State& st) {
    const auto phys = to_physical(st.sigma);
    std::vector<double> p(phys.size());
    const double th = params.theta();
    for (std::size_t q = 0; q < phys.size(); ++q)
      p[q] = std::pow(1.0 + th * phys[q], params.gamma / th) / params.gamma;
    ScalarField f = from_physical(g, p);
    f.apply_mask();
    return f;
  };

  for (std::size_t i = 1; i + 1 < traj.states.size(); ++i) {
    const State& st = traj.states[i];
    ScalarField press = pressure(st);
    double ref2 = 0.0;
    double res2 = 0.0;
    for (int j = 0; j < dim; ++j) {
      ScalarField mj = momentum(st, j);
      ScalarField residual =
          (1.0 / (2.0 * traj.dt)) * (momentum(traj.states[i + 1], j) - momentum(traj.states[i - 1], j));
      for (int d = 0; d < dim; ++d) {
        ScalarField flux = dealiased_product(mj, st.velocity[d]);
        residual += spectral_derivative(flux, d);
      }
      residual += spectral_derivative(press, j);
      residual += mj;  // damping
      res2 += std::pow(sobolev_norm(residual, 0.0), 2);
      ref2 += std::pow(sobolev_norm(mj, 0.0), 2);
    }
    if (ref2 == 0.0) continue;
    worst = std::max(worst, std::sqrt(res2 / ref2));
  }
  return worst;
}

}  // namespace eulerlab
