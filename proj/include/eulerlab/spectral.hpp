#pragma once

#include <cmath>
#include <random>

#include "eulerlab/field.hpp"
#include "eulerlab/transform.hpp"

namespace eulerlab {

/// Which (1 + c|xi|^2)^s multiplier family a Sobolev norm uses.
/// Physical matches derivative sums (c = 4 pi^2); Paper matches the
/// multiplier S (c = 1) so S-isometry identities hold exactly.
enum class Weight { Physical, Paper };

inline double sobolev_weight(const std::array<int, 3>& xi, double s, Weight w) {
  const double xi2 = GridSpec::xi_norm2(xi);
  const double base = w == Weight::Physical ? 1.0 + kTwoPi * kTwoPi * xi2 : 1.0 + xi2;
  return std::pow(base, s);
}

/// d/dx_axis as the multiplier 2 pi i xi_axis.
inline ScalarField spectral_derivative(const ScalarField& f, int axis) {
  if (axis < 0 || axis >= f.grid.dim) throw Error("spectral_derivative: axis out of range");
  ScalarField out(f.grid);
  for (std::size_t p = 0; p < f.coeffs.size(); ++p) {
    const auto xi = f.grid.xi_of(p);
    out.coeffs[p] = f.coeffs[p] * Complex(0.0, kTwoPi * xi[axis]);
  }
  return out;
}

inline ScalarField divergence(const std::vector<ScalarField>& u) {
  ScalarField out(u.at(0).grid);
  for (int d = 0; d < out.grid.dim; ++d) out += spectral_derivative(u[d], d);
  return out;
}

enum class BesselShift { Raise, Lower };  // S multiplies by (1+|xi|^2)^{+1/2} / ^{-1/2}

inline ScalarField bessel_shift(const ScalarField& f, BesselShift dir) {
  ScalarField out(f.grid);
  const double e = dir == BesselShift::Raise ? 0.5 : -0.5;
  for (std::size_t p = 0; p < f.coeffs.size(); ++p) {
    const auto xi = f.grid.xi_of(p);
    out.coeffs[p] = f.coeffs[p] * std::pow(1.0 + GridSpec::xi_norm2(xi), e);
  }
  return out;
}

inline double sobolev_norm(const ScalarField& f, double s, Weight w = Weight::Physical) {
  double sum = 0.0;  // fixed summation order: lattice storage order
  for (std::size_t p = 0; p < f.coeffs.size(); ++p) {
    const auto xi = f.grid.xi_of(p);
    sum += sobolev_weight(xi, s, w) * std::norm(f.coeffs[p]);
  }
  return std::sqrt(sum);
}

/// ||(sigma,U)||_s = ||sigma||_s + sum_i ||U_i||_s.
inline double sobolev_norm(const State& st, double s, Weight w = Weight::Physical) {
  double total = sobolev_norm(st.sigma, s, w);
  for (const auto& u : st.velocity) total += sobolev_norm(u, s, w);
  return total;
}

/// Hilbertized variant: l2 combination over components instead of the sum.
inline double sobolev_norm_l2(const State& st, double s, Weight w = Weight::Physical) {
  double q = sobolev_norm(st.sigma, s, w);
  double sum = q * q;
  for (const auto& u : st.velocity) {
    q = sobolev_norm(u, s, w);
    sum += q * q;
  }
  return std::sqrt(sum);
}

/// Pointwise product with both inputs and the output restricted to the
/// dealias band; alias-free for quadratic nonlinearities under the 2/3 rule.
inline ScalarField dealiased_product(const ScalarField& f, const ScalarField& g) {
  f.check_grid(g);
  ScalarField fm = f;
  fm.apply_mask();
  ScalarField gm = g;
  gm.apply_mask();
  const auto fp = to_physical(fm);
  const auto gp = to_physical(gm);
  std::vector<double> prod(fp.size());
  for (std::size_t p = 0; p < fp.size(); ++p) prod[p] = fp[p] * gp[p];
  ScalarField out = from_physical(f.grid, prod);
  out.apply_mask();
  return out;
}

struct RandomStateOptions {
  double spectrum_exponent = -1.0;  // <0: use 2*(s_target+2)
  int max_abs_mode = -1;            // <0: use the dealias cutoff
  bool zero_mean_sigma = true;
  double sigma_sup_cap = -1.0;  // <0: no cap check (set by callers with theta)
};

/// Reproducible random admissible data: Hermitian-symmetric coefficients with
/// envelope (1+|xi|^2)^{-expo/2}, rescaled so the s_target norm equals
/// norm_target. Deterministic in seed; independent of thread count.
inline State random_state(std::uint64_t seed, const GridSpec& grid, double s_target,
                          double norm_target, RandomStateOptions opt = {}) {
  if (!(norm_target > 0.0)) throw Error("random_state: norm_target must be positive");
  const double expo = opt.spectrum_exponent >= 0.0 ? opt.spectrum_exponent : 2.0 * (s_target + 2.0);
  const int kmax = opt.max_abs_mode >= 0 ? std::min(opt.max_abs_mode, grid.dealias_cutoff)
                                         : grid.dealias_cutoff;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  State st(grid);

  auto fill = [&](ScalarField& f) {
    // Draw in fixed lattice order, then symmetrize so f is real.
    std::vector<Complex> raw(f.coeffs.size(), Complex(0.0, 0.0));
    for (std::size_t p = 0; p < raw.size(); ++p) {
      const auto xi = grid.xi_of(p);
      bool keep = true;
      for (int d = 0; d < grid.dim; ++d)
        if (std::abs(xi[d]) > kmax) keep = false;
      const double re = gauss(rng);
      const double im = gauss(rng);
      if (!keep) continue;
      const double env = std::pow(1.0 + GridSpec::xi_norm2(xi), -expo / 2.0);
      raw[p] = env * Complex(re, im);
    }
    for (std::size_t p = 0; p < raw.size(); ++p) {
      const auto xi = grid.xi_of(p);
      std::array<int, 3> neg{0, 0, 0};
      for (int d = 0; d < grid.dim; ++d) neg[d] = -xi[d];
      // kmax < n/2, so -xi is always on the lattice for retained modes.
      f.coeffs[p] = 0.5 * (raw[p] + std::conj(raw[grid.index_of(neg)]));
    }
  };

  fill(st.sigma);
  if (opt.zero_mean_sigma) st.sigma.coeffs[0] = Complex(0.0, 0.0);
  for (auto& u : st.velocity) fill(u);

  const double norm0 = sobolev_norm(st, s_target);
  if (norm0 == 0.0) throw Error("random_state: degenerate draw");
  st *= norm_target / norm0;

  if (opt.sigma_sup_cap > 0.0) {
    const auto sp = to_physical(st.sigma);
    double sup = 0.0;
    for (double v : sp) sup = std::max(sup, std::abs(v));
    if (sup >= opt.sigma_sup_cap)
      throw NonPhysicalDensity("random_state: sigma amplitude exceeds positivity cap");
  }
  return st;
}

}  // namespace eulerlab
