#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "eulerlab/errors.hpp"

namespace eulerlab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Discretization of the periodic box [0,1]^dim: N samples per axis,
/// integer modes xi with -N/2 <= xi_i <= N/2-1 in FFT storage order,
/// and a symmetric dealias band |xi_i| <= cutoff.
struct GridSpec {
  int dim = 0;
  int n = 0;  // modes (= samples) per axis
  double dealias_fraction = 2.0 / 3.0;
  int dealias_cutoff = 0;  // floor(fraction * n/2)

  std::size_t total_samples() const {
    std::size_t t = 1;
    for (int d = 0; d < dim; ++d) t *= static_cast<std::size_t>(n);
    return t;
  }

  // FFT frequency index -> signed mode number.
  int freq_to_xi(int k) const { return k <= n / 2 - 1 ? k : k - n; }
  // Signed mode number -> FFT frequency index; xi must satisfy -n/2 <= xi < n/2.
  int xi_to_freq(int xi) const { return xi >= 0 ? xi : xi + n; }

  std::array<int, 3> xi_of(std::size_t p) const {
    std::array<int, 3> xi{0, 0, 0};
    for (int d = dim - 1; d >= 0; --d) {
      xi[d] = freq_to_xi(static_cast<int>(p % n));
      p /= n;
    }
    return xi;
  }

  std::size_t index_of(const std::array<int, 3>& xi) const {
    std::size_t p = 0;
    for (int d = 0; d < dim; ++d) p = p * n + static_cast<std::size_t>(xi_to_freq(xi[d]));
    return p;
  }

  bool in_lattice(const std::array<int, 3>& xi) const {
    for (int d = 0; d < dim; ++d)
      if (xi[d] < -n / 2 || xi[d] > n / 2 - 1) return false;
    return true;
  }

  bool in_mask(const std::array<int, 3>& xi) const {
    for (int d = 0; d < dim; ++d)
      if (std::abs(xi[d]) > dealias_cutoff) return false;
    return true;
  }

  bool in_mask(std::size_t p) const { return in_mask(xi_of(p)); }

  static double xi_norm2(const std::array<int, 3>& xi) {
    return double(xi[0]) * xi[0] + double(xi[1]) * xi[1] + double(xi[2]) * xi[2];
  }

  bool operator==(const GridSpec& o) const {
    return dim == o.dim && n == o.n && dealias_cutoff == o.dealias_cutoff;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

inline GridSpec make_grid(int dim, int n, double dealias_fraction = 2.0 / 3.0) {
  if (dim < 1 || dim > 3)
    throw InvalidGrid("make_grid: dim must be 1, 2 or 3, got " + std::to_string(dim));
  if (n < 8 || n % 2 != 0)
    throw InvalidGrid("make_grid: N must be even and >= 8, got " + std::to_string(n));
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
    throw InvalidGrid("make_grid: dealias fraction must lie in (0,1]");
  GridSpec g;
  g.dim = dim;
  g.n = n;
  g.dealias_fraction = dealias_fraction;
  g.dealias_cutoff = static_cast<int>(std::floor(dealias_fraction * (n / 2)));
  return g;
}

}  // namespace eulerlab
