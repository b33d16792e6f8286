#pragma once

#include <cmath>

#include "eulerlab/spectral.hpp"

namespace eulerlab {

/// Polytropic gas, pressure P(rho) = rho^gamma / gamma.
struct GasParameters {
  double gamma = 1.4;
  double theta() const { return 0.5 * (gamma - 1.0); }
};

enum class DensityTransform { RhoToSigma, SigmaToRho };

/// sigma = (rho^theta - 1)/theta and its inverse, pointwise on the grid.
inline ScalarField rho_sigma_transform(const ScalarField& f, DensityTransform dir,
                                       const GasParameters& params) {
  const double th = params.theta();
  auto phys = to_physical(f);
  if (dir == DensityTransform::RhoToSigma) {
    for (auto& v : phys) {
      if (!(v > 0.0)) throw NonPhysicalDensity("rho_sigma_transform: rho <= 0 on the grid");
      v = (std::pow(v, th) - 1.0) / th;
    }
  } else {
    for (auto& v : phys) {
      const double base = 1.0 + th * v;
      if (!(base > 0.0)) throw NonPhysicalDensity("rho_sigma_transform: 1 + theta sigma <= 0");
      v = std::pow(base, 1.0 / th);
    }
  }
  return from_physical(f.grid, phys);
}

namespace detail {

struct PhysicalState {
  std::vector<double> sigma;
  std::vector<std::vector<double>> velocity;
};

inline PhysicalState to_physical_masked(const State& st) {
  PhysicalState out;
  ScalarField s = st.sigma;
  s.apply_mask();
  out.sigma = to_physical(s);
  out.velocity.resize(st.dim());
  for (int d = 0; d < st.dim(); ++d) {
    ScalarField u = st.velocity[d];
    u.apply_mask();
    out.velocity[d] = to_physical(u);
  }
  return out;
}

}  // namespace detail

/// B_{sigma,U}(sigma1, U1) = -(U . grad sigma1 + theta sigma div U1,
///                             theta sigma grad sigma1 + U . grad U1),
/// all products dealiased. Bilinear in (coefficients, argument).
inline State apply_B(const State& coefficients, const State& argument, const GasParameters& params) {
  if (coefficients.grid() != argument.grid()) throw GridMismatch("apply_B: grids differ");
  const GridSpec& g = coefficients.grid();
  const int dim = g.dim;
  const double th = params.theta();

  const auto coeff = detail::to_physical_masked(coefficients);

  auto phys_masked_derivative = [&](const ScalarField& f, int axis) {
    ScalarField df = spectral_derivative(f, axis);
    df.apply_mask();
    return to_physical(df);
  };

  const std::size_t npts = g.total_samples();
  std::vector<double> sigma_out(npts, 0.0);

  // sigma equation: U . grad sigma1 + theta sigma div U1
  for (int d = 0; d < dim; ++d) {
    const auto dsig = phys_masked_derivative(argument.sigma, d);
    const auto dud = phys_masked_derivative(argument.velocity[d], d);
    for (std::size_t p = 0; p < npts; ++p)
      sigma_out[p] += coeff.velocity[d][p] * dsig[p] + th * coeff.sigma[p] * dud[p];
  }

  State out(g);
  {
    ScalarField f = from_physical(g, sigma_out);
    f.apply_mask();
    out.sigma = (-1.0) * f;
  }

  // velocity equation, component j: theta sigma d_j sigma1 + sum_i U_i d_i U1_j
  for (int j = 0; j < dim; ++j) {
    const auto dsig_j = phys_masked_derivative(argument.sigma, j);
    std::vector<double> uj_out(npts, 0.0);
    for (std::size_t p = 0; p < npts; ++p) uj_out[p] = th * coeff.sigma[p] * dsig_j[p];
    for (int i = 0; i < dim; ++i) {
      const auto duj = phys_masked_derivative(argument.velocity[j], i);
      for (std::size_t p = 0; p < npts; ++p) uj_out[p] += coeff.velocity[i][p] * duj[p];
    }
    ScalarField f = from_physical(g, uj_out);
    f.apply_mask();
    out.velocity[j] = (-1.0) * f;
  }
  return out;
}

/// L2-adjoint of B_{sigma,U} (same dealiasing), used by the commutator probe:
/// (B* y)_sigma = div(U y_sigma) + div(theta sigma y_U),
/// (B* y)_{U_j} = d_j(theta sigma y_sigma) + div(U y_{U_j}).
inline State apply_B_adjoint(const State& coefficients, const State& argument,
                             const GasParameters& params) {
  if (coefficients.grid() != argument.grid()) throw GridMismatch("apply_B_adjoint: grids differ");
  const GridSpec& g = coefficients.grid();
  const int dim = g.dim;
  const double th = params.theta();

  State out(g);
  // sigma component
  for (int d = 0; d < dim; ++d) {
    ScalarField prod = dealiased_product(coefficients.velocity[d], argument.sigma);
    ScalarField prod2 = dealiased_product(coefficients.sigma, argument.velocity[d]);
    out.sigma += spectral_derivative(prod, d) + th * spectral_derivative(prod2, d);
  }
  // velocity components
  for (int j = 0; j < dim; ++j) {
    ScalarField prod = dealiased_product(coefficients.sigma, argument.sigma);
    out.velocity[j] = th * spectral_derivative(prod, j);
    for (int i = 0; i < dim; ++i) {
      ScalarField pj = dealiased_product(coefficients.velocity[i], argument.velocity[j]);
      out.velocity[j] += spectral_derivative(pj, i);
    }
  }
  out.apply_mask();
  return out;
}

/// Exact spectral application of A: (sigma, U) -> (-div U, -grad sigma - U).
inline State apply_A(const State& st) {
  const GridSpec& g = st.grid();
  const int dim = g.dim;
  State out(g);
  for (std::size_t p = 0; p < g.total_samples(); ++p) {
    const auto xi = g.xi_of(p);
    Complex div(0.0, 0.0);
    for (int d = 0; d < dim; ++d) div += Complex(0.0, kTwoPi * xi[d]) * st.velocity[d].coeffs[p];
    out.sigma.coeffs[p] = -div;
    for (int d = 0; d < dim; ++d)
      out.velocity[d].coeffs[p] =
          -Complex(0.0, kTwoPi * xi[d]) * st.sigma.coeffs[p] - st.velocity[d].coeffs[p];
  }
  return out;
}

/// Right side of the evolution equation: (A + B_{sigma,U})(sigma, U).
inline State full_rhs(const State& st, const GasParameters& params) {
  return apply_A(st) + apply_B(st, st, params);
}

}  // namespace eulerlab
