#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "eulerlab/errors.hpp"
#include "eulerlab/grid.hpp"

namespace eulerlab {

using Complex = std::complex<double>;

/// Truncated Fourier coefficients of a real periodic scalar. Storage is the
/// full FFT lattice in row-major frequency order; Hermitian symmetry
/// coeff(-xi) = conj(coeff(xi)) is maintained by every operation.
struct ScalarField {
  GridSpec grid;
  std::vector<Complex> coeffs;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g) : grid(g), coeffs(g.total_samples(), Complex(0.0, 0.0)) {}

  Complex& at(const std::array<int, 3>& xi) { return coeffs[grid.index_of(xi)]; }
  const Complex& at(const std::array<int, 3>& xi) const { return coeffs[grid.index_of(xi)]; }

  ScalarField& operator+=(const ScalarField& o) {
    check_grid(o);
    for (std::size_t p = 0; p < coeffs.size(); ++p) coeffs[p] += o.coeffs[p];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    check_grid(o);
    for (std::size_t p = 0; p < coeffs.size(); ++p) coeffs[p] -= o.coeffs[p];
    return *this;
  }
  ScalarField& operator*=(double a) {
    for (auto& c : coeffs) c *= a;
    return *this;
  }

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double a, ScalarField f) { return f *= a; }

  void check_grid(const ScalarField& o) const {
    if (grid != o.grid) throw GridMismatch("fields live on different grids");
  }

  /// Zero all coefficients outside the dealias band.
  void apply_mask() {
    for (std::size_t p = 0; p < coeffs.size(); ++p)
      if (!grid.in_mask(p)) coeffs[p] = Complex(0.0, 0.0);
  }

  double max_hermitian_asymmetry() const {
    double worst = 0.0;
    for (std::size_t p = 0; p < coeffs.size(); ++p) {
      auto xi = grid.xi_of(p);
      std::array<int, 3> neg{0, 0, 0};
      bool ok = true;
      for (int d = 0; d < grid.dim; ++d) {
        neg[d] = -xi[d];
        if (neg[d] == grid.n / 2) ok = false;  // Nyquist line has no partner
      }
      if (!ok) continue;
      Complex diff = coeffs[p] - std::conj(coeffs[grid.index_of(neg)]);
      worst = std::max(worst, std::abs(diff));
    }
    return worst;
  }
};

/// Spatial mean and the zero-mean remainder.
inline std::pair<double, ScalarField> mean_project(const ScalarField& f) {
  double mean = f.coeffs[0].real();
  ScalarField rest = f;
  rest.coeffs[0] = Complex(0.0, 0.0);
  return {mean, std::move(rest)};
}

/// The evolved pair (sigma, U).
struct State {
  ScalarField sigma;
  std::vector<ScalarField> velocity;  // dim components

  State() = default;
  explicit State(const GridSpec& g) : sigma(g), velocity(g.dim, ScalarField(g)) {}

  const GridSpec& grid() const { return sigma.grid; }
  int dim() const { return sigma.grid.dim; }

  State& operator+=(const State& o) {
    sigma += o.sigma;
    for (int d = 0; d < dim(); ++d) velocity[d] += o.velocity[d];
    return *this;
  }
  State& operator-=(const State& o) {
    sigma -= o.sigma;
    for (int d = 0; d < dim(); ++d) velocity[d] -= o.velocity[d];
    return *this;
  }
  State& operator*=(double a) {
    sigma *= a;
    for (auto& u : velocity) u *= a;
    return *this;
  }
  friend State operator+(State a, const State& b) { return a += b; }
  friend State operator-(State a, const State& b) { return a -= b; }
  friend State operator*(double a, State s) { return s *= a; }

  void apply_mask() {
    sigma.apply_mask();
    for (auto& u : velocity) u.apply_mask();
  }

  double max_hermitian_asymmetry() const {
    double worst = sigma.max_hermitian_asymmetry();
    for (const auto& u : velocity) worst = std::max(worst, u.max_hermitian_asymmetry());
    return worst;
  }
};

}  // namespace eulerlab
