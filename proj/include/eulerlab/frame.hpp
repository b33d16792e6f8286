#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "eulerlab/dynamics.hpp"

namespace eulerlab {

namespace detail {

/// Enumeration of the frame truncation V = {zero-mean sigma modes} (+)
/// {all U modes including xi = 0}, |xi_i| <= K, in a fixed lexicographic order.
struct FrameModeSet {
  GridSpec grid;
  int k_frame = 0;
  std::vector<std::array<int, 3>> modes;   // all |xi|_inf <= K, lex order
  std::vector<std::size_t> lattice_index;  // per mode
  std::size_t zero_pos = 0;                // position of xi = 0 in `modes`

  FrameModeSet(const GridSpec& g, int k) : grid(g), k_frame(k) {
    if (k < 1) throw Error("frame truncation must be >= 1");
    if (k > g.n / 2 - 1) throw Error("frame truncation exceeds the grid");
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < g.dim; ++d) {
      lo[d] = -k;
      hi[d] = k;
    }
    std::array<int, 3> xi = lo;
    while (true) {
      modes.push_back(xi);
      lattice_index.push_back(g.index_of(xi));
      if (xi[0] == 0 && xi[1] == 0 && xi[2] == 0) zero_pos = modes.size() - 1;
      int d = g.dim - 1;
      while (d >= 0) {
        if (++xi[d] <= hi[d]) break;
        xi[d] = lo[d];
        --d;
      }
      if (d < 0) break;
    }
  }

  std::size_t size() const { return modes.size(); }
  // Total column count: (size-1) sigma columns + dim*size velocity columns.
  std::size_t total_columns() const { return size() - 1 + grid.dim * size(); }
};

/// Row/column coefficient storage for (l1, l2) or workspace vectors over V.
struct FrameVector {
  std::vector<Complex> sigma;                // per mode (entry at zero_pos unused)
  std::vector<std::array<Complex, 3>> vel;   // per mode, dim components

  explicit FrameVector(std::size_t m)
      : sigma(m, Complex(0, 0)), vel(m, {Complex(0, 0), Complex(0, 0), Complex(0, 0)}) {}

  void clear() {
    for (auto& c : sigma) c = Complex(0, 0);
    for (auto& v : vel) v = {Complex(0, 0), Complex(0, 0), Complex(0, 0)};
  }

  double norm() const {
    double s = 0.0;
    for (const auto& c : sigma) s += std::norm(c);
    for (const auto& v : vel)
      for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
  }

  double distance(const FrameVector& o) const {
    double s = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i) s += std::norm(sigma[i] - o.sigma[i]);
    for (std::size_t i = 0; i < vel.size(); ++i)
      for (int j = 0; j < 3; ++j) s += std::norm(vel[i][j] - o.vel[i][j]);
    return std::sqrt(s);
  }
};

}  // namespace detail

/// The linear functionals (L1, L2) solved at one base state, as coefficient
/// rows over the frame truncation. L1 f = sum_xi l1(xi) fhat(xi) with
/// l1(0) = 0, which realizes the extension L1 f = L1 (I - P) f.
struct FrameFunctionals {
  GridSpec grid;
  int k_frame = 0;
  GasParameters params;
  ScalarField l1;                  // sigma row (zero outside V, zero at xi = 0)
  std::vector<ScalarField> l2;     // U rows, dim components
  double base_norm_s = 0.0;        // s-norm of the base state (records the delta-ball)
  double solve_residual = 0.0;     // ||(l1,l2) T - b|| achieved

  double row_norm() const {
    double s = 0.0;
    for (const auto& c : l1.coeffs) s += std::norm(c);
    for (const auto& f : l2)
      for (const auto& c : f.coeffs) s += std::norm(c);
    return std::sqrt(s);
  }

  double apply_l1(const ScalarField& f) const {
    if (f.grid != grid) throw GridMismatch("apply_l1: grid differs");
    Complex acc(0.0, 0.0);
    for (std::size_t p = 0; p < l1.coeffs.size(); ++p)
      if (l1.coeffs[p] != Complex(0.0, 0.0)) acc += l1.coeffs[p] * f.coeffs[p];
    return acc.real();
  }

  double apply_l2(const std::vector<ScalarField>& u) const {
    Complex acc(0.0, 0.0);
    for (int d = 0; d < grid.dim; ++d) {
      if (u.at(d).grid != grid) throw GridMismatch("apply_l2: grid differs");
      for (std::size_t p = 0; p < l2[d].coeffs.size(); ++p)
        if (l2[d].coeffs[p] != Complex(0.0, 0.0)) acc += l2[d].coeffs[p] * u[d].coeffs[p];
    }
    return acc.real();
  }
};

namespace detail {

// Accumulate r = l * DT, the state-dependent part of the frame system applied
// from the left, plus (optionally) assemble DT densely. Entries:
//   DT[(xi,sigma),(eta,sigma)]  = Uhat(xi-eta) . ik_eta
//   DT[(xi,sigma),(eta,U_j)]    = theta sigmahat(xi-eta) (ik_eta)_j
//   DT[(xi,U_j),(eta,sigma)]    = theta sigmahat(xi-eta) (ik_eta)_j
//   DT[(xi,U_j),(eta,U_l)]      = delta_jl Uhat(xi-eta) . ik_eta
inline void left_apply_delta(const FrameModeSet& v, const State& state, double theta,
                             const FrameVector& l, FrameVector& out) {
  const GridSpec& g = v.grid;
  const int dim = g.dim;
  out.clear();
  const std::size_t m = v.size();
  for (std::size_t row = 0; row < m; ++row) {
    const auto& xi = v.modes[row];
    const Complex l1row = row == v.zero_pos ? Complex(0.0, 0.0) : l.sigma[row];
    const auto& l2row = l.vel[row];
    bool any = l1row != Complex(0.0, 0.0);
    for (int d = 0; d < dim && !any; ++d) any = l2row[d] != Complex(0.0, 0.0);
    if (!any) continue;
    for (std::size_t col = 0; col < m; ++col) {
      const auto& eta = v.modes[col];
      std::array<int, 3> diff{0, 0, 0};
      for (int d = 0; d < dim; ++d) diff[d] = xi[d] - eta[d];
      if (!g.in_lattice(diff) || !g.in_mask(diff)) continue;
      const std::size_t pd = g.index_of(diff);
      const Complex sd = state.sigma.coeffs[pd];
      Complex u_dot_ik(0.0, 0.0);
      Complex l2_dot_ik(0.0, 0.0);
      for (int d = 0; d < dim; ++d) {
        const Complex ik(0.0, kTwoPi * eta[d]);
        u_dot_ik += state.velocity[d].coeffs[pd] * ik;
        l2_dot_ik += l2row[d] * ik;
      }
      if (col != v.zero_pos) out.sigma[col] += l1row * u_dot_ik + theta * l2_dot_ik * sd;
      for (int d = 0; d < dim; ++d) {
        const Complex ik(0.0, kTwoPi * eta[d]);
        out.vel[col][d] += theta * l1row * sd * ik + l2row[d] * u_dot_ik;
      }
    }
  }
}

// b(eta) = the would-be xi = 0 sigma row: P(U . grad sigma1 + theta sigma div U1).
inline FrameVector assemble_b(const FrameModeSet& v, const State& state, double theta) {
  const GridSpec& g = v.grid;
  const int dim = g.dim;
  FrameVector b(v.size());
  for (std::size_t col = 0; col < v.size(); ++col) {
    const auto& eta = v.modes[col];
    std::array<int, 3> neg{0, 0, 0};
    for (int d = 0; d < dim; ++d) neg[d] = -eta[d];
    if (!g.in_lattice(neg) || !g.in_mask(neg)) continue;
    const std::size_t pd = g.index_of(neg);
    const Complex sd = state.sigma.coeffs[pd];
    Complex u_dot_ik(0.0, 0.0);
    for (int d = 0; d < dim; ++d)
      u_dot_ik += state.velocity[d].coeffs[pd] * Complex(0.0, kTwoPi * eta[d]);
    if (col != v.zero_pos) b.sigma[col] = u_dot_ik;
    for (int d = 0; d < dim; ++d) b.vel[col][d] = theta * sd * Complex(0.0, kTwoPi * eta[d]);
  }
  return b;
}

// Solve x T0 = r per mode. T0(eta) = [[0, ik^T],[ik, I]] for eta != 0 and the
// identity on the U components at eta = 0.
inline void right_divide_t0(const FrameModeSet& v, const FrameVector& r, FrameVector& x) {
  const int dim = v.grid.dim;
  for (std::size_t col = 0; col < v.size(); ++col) {
    const auto& eta = v.modes[col];
    if (col == v.zero_pos) {
      x.sigma[col] = Complex(0.0, 0.0);
      for (int d = 0; d < dim; ++d) x.vel[col][d] = r.vel[col][d];
      continue;
    }
    double k2 = 0.0;
    Complex ik_dot_ru(0.0, 0.0);
    for (int d = 0; d < dim; ++d) {
      const double kd = kTwoPi * eta[d];
      k2 += kd * kd;
      ik_dot_ru += Complex(0.0, kd) * r.vel[col][d];
    }
    const Complex xs = (r.sigma[col] - ik_dot_ru) / k2;
    x.sigma[col] = xs;
    for (int d = 0; d < dim; ++d)
      x.vel[col][d] = r.vel[col][d] - xs * Complex(0.0, kTwoPi * eta[d]);
  }
}

}  // namespace detail

struct FrameSystem {
  detail::FrameModeSet modes;
  Eigen::MatrixXcd t;        // dense Galerkin matrix on V
  Eigen::RowVectorXcd b;
};

/// Dense assembly of Eq-(13)-type system (l1,l2) T = b on the truncation V.
/// Column/row layout: sigma modes (xi != 0) first, then dim velocity
/// components per mode, both in the FrameModeSet order.
inline FrameSystem assemble_frame_system(const State& state_in, const GasParameters& params,
                                         int k_frame) {
  State state = state_in;
  state.apply_mask();
  const GridSpec& g = state.grid();
  const int dim = g.dim;
  const double theta = params.theta();
  detail::FrameModeSet v(g, k_frame);
  const std::size_t m = v.size();
  const std::size_t ns = m - 1;
  const std::size_t total = v.total_columns();

  auto col_sigma = [&](std::size_t mode) {
    return mode < v.zero_pos ? mode : mode - 1;  // skip xi = 0
  };
  auto col_vel = [&](std::size_t mode, int d) { return ns + mode * dim + d; };

  FrameSystem sys{v, Eigen::MatrixXcd::Zero(total, total), Eigen::RowVectorXcd::Zero(total)};

  // T0: per-mode blocks.
  for (std::size_t mode = 0; mode < m; ++mode) {
    const auto& eta = v.modes[mode];
    for (int d = 0; d < dim; ++d) {
      const Complex ik(0.0, kTwoPi * eta[d]);
      if (mode != v.zero_pos) {
        sys.t(col_sigma(mode), col_vel(mode, d)) = ik;      // sigma-out <- div U1
        sys.t(col_vel(mode, d), col_sigma(mode)) = ik;      // U-out <- grad sigma1
      }
      sys.t(col_vel(mode, d), col_vel(mode, d)) = Complex(1.0, 0.0);
    }
  }

  // State-dependent part, one unit row at a time through the shared kernel.
  detail::FrameVector unit(m), row(m);
  for (std::size_t mode = 0; mode < m; ++mode) {
    for (int comp = -1; comp < dim; ++comp) {
      if (comp < 0 && mode == v.zero_pos) continue;
      unit.clear();
      if (comp < 0)
        unit.sigma[mode] = Complex(1.0, 0.0);
      else
        unit.vel[mode][comp] = Complex(1.0, 0.0);
      detail::left_apply_delta(v, state, theta, unit, row);
      const std::size_t r = comp < 0 ? col_sigma(mode) : col_vel(mode, comp);
      for (std::size_t c = 0; c < m; ++c) {
        if (c != v.zero_pos) sys.t(r, col_sigma(c)) += row.sigma[c];
        for (int d = 0; d < dim; ++d) sys.t(r, col_vel(c, d)) += row.vel[c][d];
      }
    }
  }

  const detail::FrameVector b = detail::assemble_b(v, state, theta);
  for (std::size_t c = 0; c < m; ++c) {
    if (c != v.zero_pos) sys.b(col_sigma(c)) = b.sigma[c];
    for (int d = 0; d < dim; ++d) sys.b(col_vel(c, d)) = b.vel[c][d];
  }
  return sys;
}

enum class FrameSolveMethod { Auto, Dense, FixedPoint };

/// Solve the frame system for (L1, L2) at one base state. The default path
/// is a T0-preconditioned fixed-point iteration (the zero-state system is
/// block diagonal per mode); it falls back to the dense solve when the state
/// is large enough that the iteration stalls. The residual contract
/// ||(l1,l2) T - b|| < 1e-10 ||b|| + 1e-14 is enforced on every path.
inline FrameFunctionals solve_frame(const State& state_in, const GasParameters& params,
                                    int k_frame, FrameSolveMethod method = FrameSolveMethod::Auto,
                                    const FrameFunctionals* warm_start = nullptr) {
  State state = state_in;
  state.apply_mask();
  const GridSpec& g = state.grid();
  const int dim = g.dim;
  const double theta = params.theta();
  detail::FrameModeSet v(g, k_frame);
  const std::size_t m = v.size();

  const detail::FrameVector b = detail::assemble_b(v, state, theta);
  const double b_norm = b.norm();
  const double tol = 1e-10 * b_norm + 1e-14;

  detail::FrameVector l(m), work(m), next(m);
  if (warm_start && warm_start->grid == g && warm_start->k_frame == k_frame) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t p = v.lattice_index[i];
      l.sigma[i] = warm_start->l1.coeffs[p];
      for (int d = 0; d < dim; ++d) l.vel[i][d] = warm_start->l2[d].coeffs[p];
    }
  }

  auto residual_norm = [&](const detail::FrameVector& x) {
    // ||x T - b|| = ||x T0 + x DT - b||
    detail::FrameVector acc(m);
    detail::left_apply_delta(v, state, theta, x, acc);
    double s = 0.0;
    for (std::size_t col = 0; col < m; ++col) {
      const auto& eta = v.modes[col];
      Complex rs = acc.sigma[col] - b.sigma[col];
      std::array<Complex, 3> ru{};
      for (int d = 0; d < dim; ++d) ru[d] = acc.vel[col][d] - b.vel[col][d];
      // add x T0
      if (col != v.zero_pos) {
        for (int d = 0; d < dim; ++d) rs += x.vel[col][d] * Complex(0.0, kTwoPi * eta[d]);
        for (int d = 0; d < dim; ++d)
          ru[d] += x.sigma[col] * Complex(0.0, kTwoPi * eta[d]) + x.vel[col][d];
      } else {
        for (int d = 0; d < dim; ++d) ru[d] += x.vel[col][d];
      }
      if (col != v.zero_pos) s += std::norm(rs);
      for (int d = 0; d < dim; ++d) s += std::norm(ru[d]);
    }
    return std::sqrt(s);
  };

  bool solved = false;
  if (method != FrameSolveMethod::Dense) {
    for (int it = 0; it < 100; ++it) {
      detail::left_apply_delta(v, state, theta, l, work);
      for (std::size_t i = 0; i < m; ++i) {
        work.sigma[i] = b.sigma[i] - work.sigma[i];
        for (int d = 0; d < dim; ++d) work.vel[i][d] = b.vel[i][d] - work.vel[i][d];
      }
      detail::right_divide_t0(v, work, next);
      const double step = l.distance(next);
      l = next;
      if (step < 1e-15 * std::max(1.0, l.norm())) break;
    }
    solved = residual_norm(l) <= tol;
    if (method == FrameSolveMethod::FixedPoint && !solved)
      throw FrameSolveError("solve_frame: fixed-point iteration did not reach tolerance");
  }

  if (!solved) {
    FrameSystem sys = assemble_frame_system(state, params, k_frame);
    Eigen::VectorXcd rhs = sys.b.transpose();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.t.transpose());
    Eigen::VectorXcd x = lu.solve(rhs);
    if (!x.allFinite())
      throw FrameSolveError("solve_frame: dense system is numerically singular");
    auto col_sigma = [&](std::size_t mode) { return mode < v.zero_pos ? mode : mode - 1; };
    const std::size_t ns = m - 1;
    for (std::size_t i = 0; i < m; ++i) {
      l.sigma[i] = i == v.zero_pos ? Complex(0.0, 0.0) : x(col_sigma(i));
      for (int d = 0; d < dim; ++d) l.vel[i][d] = x(ns + i * dim + d);
    }
    if (residual_norm(l) > tol)
      throw FrameSolveError("solve_frame: residual above tolerance; state outside the delta ball");
  }

  FrameFunctionals out;
  out.grid = g;
  out.k_frame = k_frame;
  out.params = params;
  out.l1 = ScalarField(g);
  out.l2.assign(dim, ScalarField(g));
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t p = v.lattice_index[i];
    if (i != v.zero_pos) out.l1.coeffs[p] = l.sigma[i];
    for (int d = 0; d < dim; ++d) out.l2[d].coeffs[p] = l.vel[i][d];
  }
  out.base_norm_s = sobolev_norm(state, 2.0);
  out.solve_residual = residual_norm(l);
  return out;
}

/// The E1 coordinate c plus the conjugated pair (sigma1, U1) = ((I-P)sigma, U).
struct DecomposedState {
  double c = 0.0;
  ScalarField sigma1;
  std::vector<ScalarField> u1;
};

inline DecomposedState decompose_state(const State& state, const FrameFunctionals& frame) {
  if (state.grid() != frame.grid) throw GridMismatch("decompose_state: grid differs");
  DecomposedState d;
  auto [mean, rest] = mean_project(state.sigma);
  d.sigma1 = std::move(rest);
  d.u1 = state.velocity;
  d.c = mean - frame.apply_l1(d.sigma1) - frame.apply_l2(d.u1);
  return d;
}

/// Reconstruction via the lift [[I+L1, L2],[0, I]] plus the E1 offset c.
inline State recompose_state(const DecomposedState& d, const FrameFunctionals& frame) {
  State out(frame.grid);
  out.sigma = d.sigma1;
  out.sigma.coeffs[0] += Complex(d.c + frame.apply_l1(d.sigma1) + frame.apply_l2(d.u1), 0.0);
  out.velocity = d.u1;
  return out;
}

/// [[I+L1, L2],[0,I]] applied to a zero-mean pair.
inline State frame_lift(const State& pair, const FrameFunctionals& frame) {
  State out = pair;
  out.sigma.coeffs[0] +=
      Complex(frame.apply_l1(pair.sigma) + frame.apply_l2(pair.velocity), 0.0);
  return out;
}

/// [[I-L1, -L2],[0,I]], the inverse lift.
inline State frame_unlift(const State& st, const FrameFunctionals& frame) {
  State out = st;
  out.sigma.coeffs[0] -=
      Complex(frame.apply_l1(st.sigma) + frame.apply_l2(st.velocity), 0.0);
  return out;
}

/// Max over probes of the E2-invariance violation |P r_sigma - L1 r_sigma -
/// L2 r_U| / ||probe||_s with r = (A + B_{sigma,U}) applied to the lifted
/// probe at full resolution.
inline double frame_residual(const State& state, const FrameFunctionals& frame,
                             const std::vector<State>& probes, double s = 2.0) {
  if (state.grid() != frame.grid) throw GridMismatch("frame_residual: grid differs");
  double worst = 0.0;
  for (const auto& probe : probes) {
    State lifted = frame_lift(probe, frame);
    State r = apply_A(lifted) + apply_B(state, lifted, frame.params);
    const double viol =
        std::abs(r.sigma.coeffs[0].real() - frame.apply_l1(r.sigma) - frame.apply_l2(r.velocity));
    const double pn = sobolev_norm(probe, s);
    if (pn > 0.0) worst = std::max(worst, viol / pn);
  }
  return worst;
}

/// Right side of the conjugated dynamics for (sigma1, U1):
/// (A + B_{sigma,U1} + Btilde)(sigma1, U1), where sigma is reconstructed from
/// the decomposition and the Btilde row adds the scalar
/// L1((I-P)(U1.grad sigma1 + (1+theta sigma) div U1))
///   + L2((1+theta sigma) grad sigma1 + U1 + U1.grad U1)
/// to the mean bookkeeping of the sigma1 equation.
inline State conjugated_rhs(const DecomposedState& d, const FrameFunctionals& frame,
                            const GasParameters& params) {
  const GridSpec& g = frame.grid;
  const int dim = g.dim;
  const double theta = params.theta();

  State pair(g);
  pair.sigma = d.sigma1;
  pair.velocity = d.u1;

  State coeff = recompose_state(d, frame);  // (sigma, U1)
  State out = apply_A(pair) + apply_B(coeff, pair, params);

  // Btilde scalar.
  ScalarField div_u1 = divergence(d.u1);
  ScalarField term_sigma = div_u1 + theta * dealiased_product(coeff.sigma, div_u1);
  {
    ScalarField grad_dot(g);
    for (int i = 0; i < dim; ++i)
      grad_dot += dealiased_product(d.u1[i], spectral_derivative(d.sigma1, i));
    term_sigma += grad_dot;
  }
  term_sigma.coeffs[0] = Complex(0.0, 0.0);  // (I-P); also implied by l1(0) = 0

  std::vector<ScalarField> term_u(dim, ScalarField(g));
  for (int j = 0; j < dim; ++j) {
    ScalarField dsig = spectral_derivative(d.sigma1, j);
    term_u[j] = dsig + theta * dealiased_product(coeff.sigma, dsig) + d.u1[j];
    for (int i = 0; i < dim; ++i)
      term_u[j] += dealiased_product(d.u1[i], spectral_derivative(d.u1[j], i));
  }

  const double scalar = frame.apply_l1(term_sigma) + frame.apply_l2(term_u);
  out.sigma.coeffs[0] += Complex(scalar, 0.0);
  return out;
}

}  // namespace eulerlab
