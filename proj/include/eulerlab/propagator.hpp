#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "eulerlab/field.hpp"
#include "eulerlab/parallel.hpp"
#include "eulerlab/spectral.hpp"

namespace eulerlab {

using MatrixXc = Eigen::MatrixXcd;

/// Per-mode eigendata of the symbol A(xi) with derivative symbol k = 2 pi xi.
/// For xi != 0 the acoustic pair is always complex conjugate:
/// lambda_{1,2} = -1/2 +- i omega, omega = sqrt(4|k|^2 - 1)/2 (|k| >= 2pi).
struct ModeSymbol {
  std::array<int, 3> xi{0, 0, 0};
  Complex lambda1, lambda2;
  double omega = 0.0;
  int shear_multiplicity = 0;
};

inline ModeSymbol mode_symbol(const std::array<int, 3>& xi, int dim) {
  ModeSymbol m;
  m.xi = xi;
  m.shear_multiplicity = dim - 1;
  const double k2 = kTwoPi * kTwoPi * GridSpec::xi_norm2(xi);
  if (k2 == 0.0) {
    m.lambda1 = Complex(0.0, 0.0);
    m.lambda2 = Complex(-1.0, 0.0);
    m.omega = 0.0;
  } else {
    m.omega = 0.5 * std::sqrt(4.0 * k2 - 1.0);
    m.lambda1 = Complex(-0.5, m.omega);
    m.lambda2 = Complex(-0.5, -m.omega);
  }
  return m;
}

/// Symbol matrix [[0, -i k^T], [-i k, -I]], k = 2 pi xi.
inline MatrixXc symbol_matrix(const std::array<int, 3>& xi, int dim) {
  MatrixXc a = MatrixXc::Zero(dim + 1, dim + 1);
  for (int d = 0; d < dim; ++d) {
    const Complex mik(0.0, -kTwoPi * xi[d]);
    a(0, 1 + d) = mik;
    a(1 + d, 0) = mik;
    a(1 + d, 1 + d) = Complex(-1.0, 0.0);
  }
  a(0, 0) = Complex(0.0, 0.0);
  return a;
}

namespace detail {

// Orthonormal real basis of the plane orthogonal to k (shear directions).
inline std::vector<Eigen::VectorXd> transverse_basis(const std::array<int, 3>& xi, int dim) {
  Eigen::VectorXd k(dim);
  for (int d = 0; d < dim; ++d) k(d) = xi[d];
  std::vector<Eigen::VectorXd> basis;
  if (dim == 1) return basis;
  if (dim == 2) {
    Eigen::VectorXd eta(2);
    eta << -k(1), k(0);
    basis.push_back(eta.normalized());
    return basis;
  }
  int axis = 0;
  for (int d = 1; d < 3; ++d)
    if (std::abs(k(d)) < std::abs(k(axis))) axis = d;
  Eigen::Vector3d kv(k(0), k(1), k(2));
  Eigen::Vector3d t = Eigen::Vector3d::Unit(axis);
  Eigen::Vector3d e1 = kv.cross(t).normalized();
  Eigen::Vector3d e2 = kv.cross(e1).normalized();
  basis.push_back(e1);
  basis.push_back(e2);
  return basis;
}

}  // namespace detail

struct ModeEigensystem {
  ModeSymbol symbol;
  MatrixXc r;  // unitary, columns (V2, V1, eta_1..eta_{dim-1})
  MatrixXc b;  // lower triangular: diag(lambda2, lambda1, -1...), subdiagonal -1
};

/// R(xi) and the triangular form B(xi) with R* A(xi) R = B(xi), xi != 0.
inline ModeEigensystem mode_eigensystem(const std::array<int, 3>& xi, int dim) {
  if (GridSpec::xi_norm2(xi) == 0.0)
    throw ZeroMode("mode_eigensystem: xi = 0 is handled by a separate branch");
  ModeEigensystem sys;
  sys.symbol = mode_symbol(xi, dim);
  const Complex l1 = sys.symbol.lambda1;
  const Complex l2 = sys.symbol.lambda2;
  const double kabs = kTwoPi * std::sqrt(GridSpec::xi_norm2(xi));

  Eigen::VectorXd k(dim);
  for (int d = 0; d < dim; ++d) k(d) = kTwoPi * xi[d];

  // |lambda_2|^2 = |k|^2, so both acoustic columns normalize by |k| sqrt(2).
  const double nrm = kabs * std::sqrt(2.0);
  Eigen::VectorXcd v1(dim + 1), v2(dim + 1);
  v1(0) = Complex(0.0, -1.0) * l2 / nrm;
  for (int d = 0; d < dim; ++d) v1(1 + d) = k(d) / nrm;
  v2(0) = Complex(0.0, 1.0) * kabs / (std::sqrt(2.0) * std::conj(l2));
  for (int d = 0; d < dim; ++d) v2(1 + d) = k(d) / nrm;

  sys.r = MatrixXc::Zero(dim + 1, dim + 1);
  sys.r.col(0) = v2;
  sys.r.col(1) = v1;
  auto etas = detail::transverse_basis(xi, dim);
  for (std::size_t j = 0; j < etas.size(); ++j) {
    sys.r(0, 2 + j) = Complex(0.0, 0.0);
    for (int d = 0; d < dim; ++d) sys.r(1 + d, 2 + j) = Complex(etas[j](d), 0.0);
  }

  sys.b = MatrixXc::Zero(dim + 1, dim + 1);
  sys.b(0, 0) = l2;
  sys.b(1, 0) = Complex(-1.0, 0.0);
  sys.b(1, 1) = l1;
  for (int j = 0; j < dim - 1; ++j) sys.b(2 + j, 2 + j) = Complex(-1.0, 0.0);
  return sys;
}

namespace detail {

// Acoustic 2x2 block of e^{tA(xi)} on (sigma, u_par):
// M = [[0, -i|k|], [-i|k|, -1]],
// e^{tM} = e^{-t/2} [cos(wt) I + sin(wt)/w (M + I/2)].
struct AcousticExp {
  Complex a, b, c, d;
};

inline AcousticExp acoustic_exp(double kabs, double t) {
  const double w = 0.5 * std::sqrt(4.0 * kabs * kabs - 1.0);
  const double decay = std::exp(-0.5 * t);
  const double cw = std::cos(w * t);
  const double sw = std::sin(w * t) / w;
  AcousticExp e;
  e.a = decay * Complex(cw + 0.5 * sw, 0.0);
  e.b = decay * Complex(0.0, -kabs * sw);
  e.c = e.b;
  e.d = decay * Complex(cw - 0.5 * sw, 0.0);
  return e;
}

}  // namespace detail

/// Closed-form e^{t A(xi)} assembled in the longitudinal/transverse split.
inline MatrixXc mode_exponential(const std::array<int, 3>& xi, double t, int dim) {
  if (t < 0.0) throw NegativeTime("mode_exponential: t must be >= 0");
  MatrixXc out = MatrixXc::Zero(dim + 1, dim + 1);
  const double xi2 = GridSpec::xi_norm2(xi);
  if (xi2 == 0.0) {
    out(0, 0) = 1.0;
    for (int d = 0; d < dim; ++d) out(1 + d, 1 + d) = std::exp(-t);
    return out;
  }
  const double kabs = kTwoPi * std::sqrt(xi2);
  const auto e = detail::acoustic_exp(kabs, t);
  Eigen::VectorXd unit(dim);
  for (int d = 0; d < dim; ++d) unit(d) = xi[d];
  unit.normalize();
  const double shear = std::exp(-t);
  out(0, 0) = e.a;
  for (int d = 0; d < dim; ++d) {
    out(0, 1 + d) = e.b * unit(d);
    out(1 + d, 0) = e.c * unit(d);
    for (int d2 = 0; d2 < dim; ++d2) {
      const double par = unit(d) * unit(d2);
      const double perp = (d == d2 ? 1.0 : 0.0) - par;
      out(1 + d, 1 + d2) = e.d * par + shear * perp;
    }
  }
  return out;
}

/// Mode-wise application of T(t) = e^{tA}.
inline State apply_semigroup(const State& st, double t) {
  if (t < 0.0) throw NegativeTime("apply_semigroup: t must be >= 0");
  const GridSpec& g = st.grid();
  const int dim = g.dim;
  State out(g);
  const double shear = std::exp(-t);
  parallel_for(g.total_samples(), [&](std::size_t p) {
    const auto xi = g.xi_of(p);
    const double xi2 = GridSpec::xi_norm2(xi);
    if (xi2 == 0.0) {
      out.sigma.coeffs[p] = st.sigma.coeffs[p];
      for (int d = 0; d < dim; ++d) out.velocity[d].coeffs[p] = shear * st.velocity[d].coeffs[p];
      return;
    }
    const double norm = std::sqrt(xi2);
    double unit[3] = {xi[0] / norm, xi[1] / norm, xi[2] / norm};
    const auto e = detail::acoustic_exp(kTwoPi * norm, t);
    Complex upar(0.0, 0.0);
    for (int d = 0; d < dim; ++d) upar += unit[d] * st.velocity[d].coeffs[p];
    const Complex s0 = st.sigma.coeffs[p];
    out.sigma.coeffs[p] = e.a * s0 + e.b * upar;
    const Complex upar_new = e.c * s0 + e.d * upar;
    for (int d = 0; d < dim; ++d) {
      const Complex perp = st.velocity[d].coeffs[p] - upar * unit[d];
      out.velocity[d].coeffs[p] = upar_new * unit[d] + shear * perp;
    }
  });
  return out;
}

/// Spectral norm of the acoustic block (the full matrix is block diagonal in
/// the orthonormal longitudinal/transverse frame, shear part has norm e^{-t}).
inline double mode_exponential_norm(const std::array<int, 3>& xi, double t) {
  const double xi2 = GridSpec::xi_norm2(xi);
  if (xi2 == 0.0) return 1.0;
  const auto e = detail::acoustic_exp(kTwoPi * std::sqrt(xi2), t);
  // Largest singular value of [[a,b],[c,d]].
  const double g11 = std::norm(e.a) + std::norm(e.c);
  const double g22 = std::norm(e.b) + std::norm(e.d);
  const Complex g12 = std::conj(e.a) * e.b + std::conj(e.c) * e.d;
  const double tr = g11 + g22;
  const double disc = std::sqrt(std::max(0.0, 0.25 * (g11 - g22) * (g11 - g22) + std::norm(g12)));
  const double smax2 = 0.5 * tr + disc;
  return std::max(std::sqrt(smax2), std::exp(-t));
}

/// Measured K of the zero-mean semigroup bound: sup over sampled t and
/// retained xi != 0 of ||e^{tA(xi)}||_2 e^{t/2}.
inline double semigroup_constant(const GridSpec& grid, const std::vector<double>& t_samples) {
  if (t_samples.empty()) throw Error("semigroup_constant: need at least one sample time");
  double sup = 0.0;
  for (std::size_t p = 0; p < grid.total_samples(); ++p) {
    const auto xi = grid.xi_of(p);
    if (GridSpec::xi_norm2(xi) == 0.0 || !grid.in_mask(xi)) continue;
    for (double t : t_samples) {
      if (!(t > 0.0) && t != 0.0) throw Error("semigroup_constant: negative sample time");
      sup = std::max(sup, mode_exponential_norm(xi, t) * std::exp(0.5 * t));
    }
  }
  return sup;
}

/// Precomputed per-mode exponentials for one fixed step size.
struct PropagatorTable {
  GridSpec grid;
  double dt = 0.0;
  std::vector<detail::AcousticExp> acoustic;  // per lattice index
  double shear = 1.0;                         // e^{-dt}

  PropagatorTable() = default;
  PropagatorTable(const GridSpec& g, double step) : grid(g), dt(step), acoustic(g.total_samples()) {
    if (dt < 0.0) throw NegativeTime("PropagatorTable: dt must be >= 0");
    shear = std::exp(-dt);
    for (std::size_t p = 0; p < acoustic.size(); ++p) {
      const double xi2 = GridSpec::xi_norm2(g.xi_of(p));
      if (xi2 == 0.0) {
        acoustic[p] = {Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(shear, 0.0)};
      } else {
        acoustic[p] = detail::acoustic_exp(kTwoPi * std::sqrt(xi2), dt);
      }
    }
  }

  State apply(const State& st) const {
    if (st.grid() != grid) throw GridMismatch("PropagatorTable: state grid differs");
    const int dim = grid.dim;
    State out(grid);
    parallel_for(grid.total_samples(), [&](std::size_t p) {
      const auto xi = grid.xi_of(p);
      const double xi2 = GridSpec::xi_norm2(xi);
      const auto& e = acoustic[p];
      if (xi2 == 0.0) {
        out.sigma.coeffs[p] = st.sigma.coeffs[p];
        for (int d = 0; d < dim; ++d) out.velocity[d].coeffs[p] = shear * st.velocity[d].coeffs[p];
        return;
      }
      const double norm = std::sqrt(xi2);
      double unit[3] = {xi[0] / norm, xi[1] / norm, xi[2] / norm};
      Complex upar(0.0, 0.0);
      for (int d = 0; d < dim; ++d) upar += unit[d] * st.velocity[d].coeffs[p];
      const Complex s0 = st.sigma.coeffs[p];
      out.sigma.coeffs[p] = e.a * s0 + e.b * upar;
      const Complex upar_new = e.c * s0 + e.d * upar;
      for (int d = 0; d < dim; ++d) {
        const Complex perp = st.velocity[d].coeffs[p] - upar * unit[d];
        out.velocity[d].coeffs[p] = upar_new * unit[d] + shear * perp;
      }
    });
    return out;
  }
};

}  // namespace eulerlab
