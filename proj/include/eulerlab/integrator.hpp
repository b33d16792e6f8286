#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "eulerlab/dynamics.hpp"
#include "eulerlab/propagator.hpp"

namespace eulerlab {

/// Uniformly sampled discrete solution path.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  GasParameters params;
  GridSpec grid;
  double dt = 0.0;

  const State& at_index(std::size_t i) const { return states.at(i); }

  std::size_t index_of_time(double t, double tol = 1e-9) const {
    const double x = (t - times.front()) / dt;
    const auto i = static_cast<std::size_t>(std::llround(x));
    if (i >= times.size() || std::abs(t - times[i]) > tol)
      throw TimeOutOfRange("trajectory has no sample at t = " + std::to_string(t));
    return i;
  }

  /// Linear-in-time interpolation between stored states (clamped at the ends).
  State interpolate(double t) const {
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    const double x = (t - times.front()) / dt;
    auto i = static_cast<std::size_t>(std::floor(x));
    if (i >= states.size() - 1) i = states.size() - 2;
    const double w = x - static_cast<double>(i);
    if (w <= 1e-12) return states[i];
    if (w >= 1.0 - 1e-12) return states[i + 1];
    return (1.0 - w) * states[i] + w * states[i + 1];
  }
};

using Nonlinearity = std::function<State(double /*t*/, const State&)>;
using Observer = std::function<void(std::size_t /*step*/, double /*t*/, const State&)>;

/// Pair of exact-propagator tables used by one Lawson step.
struct LawsonPropagators {
  PropagatorTable full;  // e^{dt A}
  PropagatorTable half;  // e^{dt/2 A}
  LawsonPropagators() = default;
  LawsonPropagators(const GridSpec& g, double dt)
      : full(g, dt), half(g, 0.5 * dt) {}
};

/// Classical 4-stage Lawson scheme: RK4 on the exponentially transformed
/// variable, so purely linear problems are propagated exactly.
inline State lawson_rk4_step(const State& state, double t, double dt,
                             const LawsonPropagators& props, const Nonlinearity& nonlin) {
  if (state.grid() != props.full.grid) throw GridMismatch("lawson_rk4_step: grid differs");
  if (dt == 0.0) return state;
  const State n1 = nonlin(t, state);
  const State n2 = nonlin(t + 0.5 * dt, props.half.apply(state + (0.5 * dt) * n1));
  const State half_state = props.half.apply(state);
  const State n3 = nonlin(t + 0.5 * dt, half_state + (0.5 * dt) * n2);
  const State n4 = nonlin(t + dt, props.full.apply(state) + dt * props.half.apply(n3));
  State out = props.full.apply(state);
  out += (dt / 6.0) * props.full.apply(n1);
  out += (dt / 3.0) * props.half.apply(n2 + n3);
  out += (dt / 6.0) * n4;
  return out;
}

struct EvolveOptions {
  double blowup_norm_s = 2.0;       // norm index used by the blow-up guard
  double blowup_ceiling = -1.0;     // <0: 10 * initial norm + 1
  bool nonlinear = true;            // false: pure semigroup (B disabled)
};

/// Integrate the full equation from `initial` to T_end with fixed dt,
/// recording every step. Observers run on one thread in time order.
inline Trajectory evolve(const State& initial, const GasParameters& params, double t_end,
                         double dt, const std::vector<Observer>& observers = {},
                         EvolveOptions opt = {}) {
  if (!(t_end > 0.0) || !(dt > 0.0)) throw Error("evolve: T_end and dt must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  if (std::abs(steps * dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw Error("evolve: dt must divide T_end");

  const GridSpec& g = initial.grid();
  LawsonPropagators props(g, dt);
  Nonlinearity nonlin;
  if (opt.nonlinear) {
    nonlin = [&params](double, const State& y) { return apply_B(y, y, params); };
  } else {
    nonlin = [&g](double, const State&) { return State(g); };
  }

  const double norm0 = sobolev_norm(initial, opt.blowup_norm_s);
  const double ceiling = opt.blowup_ceiling > 0.0 ? opt.blowup_ceiling : 10.0 * norm0 + 1.0;

  Trajectory traj;
  traj.params = params;
  traj.grid = g;
  traj.dt = dt;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  for (const auto& obs : observers) obs(0, 0.0, initial);

  for (std::size_t i = 1; i <= steps; ++i) {
    const double t_prev = (i - 1) * dt;
    State next = lawson_rk4_step(traj.states.back(), t_prev, dt, props, nonlin);
    const double t = i * dt;
    const double norm = sobolev_norm(next, opt.blowup_norm_s);
    if (!(norm <= ceiling) || !std::isfinite(norm))
      throw BlowUp("evolve: norm " + std::to_string(norm) + " exceeded ceiling " +
                   std::to_string(ceiling) + " at t = " + std::to_string(t));
    traj.times.push_back(t);
    traj.states.push_back(std::move(next));
    for (const auto& obs : observers) obs(i, t, traj.states.back());
  }
  return traj;
}

/// Frozen-coefficient linear evolution: integrates y' = (A + B_{sigma(t),U(t)}) y
/// with coefficients interpolated from `path`, realizing M_{sigma,U}(t, tau).
inline State frozen_evolve(const Trajectory& path, const State& initial, double from_time,
                           double to_time) {
  if (initial.grid() != path.grid) throw GridMismatch("frozen_evolve: grid differs");
  if (from_time < path.times.front() - 1e-12 || to_time > path.times.back() + 1e-12 ||
      to_time < from_time)
    throw TimeOutOfRange("frozen_evolve: [from,to] outside the coefficient path");
  const double dt = path.dt;
  const auto i0 = path.index_of_time(from_time);
  const auto i1 = path.index_of_time(to_time);

  LawsonPropagators props(path.grid, dt);
  const GasParameters params = path.params;
  Nonlinearity nonlin = [&path, params](double t, const State& y) {
    return apply_B(path.interpolate(t), y, params);
  };

  State y = initial;
  for (std::size_t i = i0; i < i1; ++i)
    y = lawson_rk4_step(y, path.times[i], dt, props, nonlin);
  return y;
}

/// One application of the Picard map F: integrate the frozen-coefficient
/// problem along `guess` from the fixed initial datum, sampled on the same
/// time lattice as the guess.
inline Trajectory picard_apply(const Trajectory& guess, const State& initial) {
  if (initial.grid() != guess.grid) throw GridMismatch("picard_apply: grid differs");
  const double dt = guess.dt;
  LawsonPropagators props(guess.grid, dt);
  const GasParameters params = guess.params;
  Nonlinearity nonlin = [&guess, params](double t, const State& y) {
    return apply_B(guess.interpolate(t), y, params);
  };

  Trajectory out;
  out.params = params;
  out.grid = guess.grid;
  out.dt = dt;
  out.times = guess.times;
  out.states.reserve(guess.states.size());
  out.states.push_back(initial);
  for (std::size_t i = 1; i < guess.times.size(); ++i)
    out.states.push_back(
        lawson_rk4_step(out.states.back(), guess.times[i - 1], dt, props, nonlin));
  return out;
}

/// sup over lattice times of the s-norm (the Z-norm of the contraction space).
inline double z_norm(const Trajectory& traj, double s) {
  double sup = 0.0;
  for (const auto& st : traj.states) sup = std::max(sup, sobolev_norm(st, s));
  return sup;
}

inline double z_distance(const Trajectory& a, const Trajectory& b, double s) {
  if (a.states.size() != b.states.size()) throw ShapeMismatch("z_distance: size mismatch");
  double sup = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i)
    sup = std::max(sup, sobolev_norm(a.states[i] - b.states[i], s));
  return sup;
}

struct PicardResult {
  Trajectory fixed_point;                // last iterate
  std::vector<double> difference_norms;  // ||g_{m+1} - g_m||_Z
  std::vector<double> ratios;            // successive-difference ratios
  double contraction_factor = 0.0;       // last ratio
  double sup_high_norm = 0.0;            // sup_t of the (s+1)-norm over iterates
};

/// Picard iteration of the local-existence map, starting from the
/// constant-in-time guess. Reports measured contraction in the Z-norm.
inline PicardResult picard_iterate(const State& initial, const GasParameters& params,
                                   double t_window, double dt, double s, int iterations = 6) {
  if (!(t_window > 0.0)) throw Error("picard_iterate: window must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(t_window / dt));
  Trajectory guess;
  guess.params = params;
  guess.grid = initial.grid();
  guess.dt = dt;
  for (std::size_t i = 0; i <= steps; ++i) {
    guess.times.push_back(i * dt);
    guess.states.push_back(initial);
  }

  PicardResult res;
  res.sup_high_norm = sobolev_norm(initial, s + 1.0);
  for (int m = 0; m < iterations; ++m) {
    Trajectory next = picard_apply(guess, initial);
    res.difference_norms.push_back(z_distance(next, guess, s));
    res.sup_high_norm = std::max(res.sup_high_norm, z_norm(next, s + 1.0));
    guess = std::move(next);
    const auto k = res.difference_norms.size();
    if (k >= 2 && res.difference_norms[k - 2] > 0.0)
      res.ratios.push_back(res.difference_norms[k - 1] / res.difference_norms[k - 2]);
  }
  if (!res.ratios.empty()) res.contraction_factor = res.ratios.back();
  res.fixed_point = std::move(guess);
  return res;
}

}  // namespace eulerlab
