#include <catch2/catch_amalgamated.hpp>

#include "eulerlab/diagnostics.hpp"
#include "eulerlab/frame.hpp"

using namespace eulerlab;

namespace {
const GasParameters params;
}

TEST_CASE("fit_decay") {
  std::vector<double> ts, vs;
  for (int i = 0; i <= 300; ++i) ts.push_back(0.01 * i);

  SECTION("exact exponential") {
    vs.clear();
    for (double t : ts) vs.push_back(std::exp(-0.5 * t));
    DecayReport r = fit_decay(ts, vs, 0.0, 3.0);
    CHECK(std::abs(r.fitted_rate - 0.5) < 1e-10);
    CHECK(std::abs(r.fitted_prefactor - 1.0) < 1e-10);
    CHECK(r.residual_of_fit < 1e-10);
  }

  SECTION("oscillatory series, envelope variant") {
    vs.clear();
    for (double t : ts) vs.push_back(std::exp(-0.5 * t) * (2.0 + std::cos(7.0 * t)));
    DecayReport r = fit_decay(ts, vs, 0.0, 3.0, true);
    CHECK(std::abs(r.fitted_rate - 0.5) < 0.02 * 0.5);
  }

  SECTION("constant series") {
    vs.assign(ts.size(), 2.5);
    DecayReport r = fit_decay(ts, vs, 0.0, 3.0);
    CHECK(std::abs(r.fitted_rate) < 1e-10);
  }

  SECTION("non-positive values rejected") {
    vs.assign(ts.size(), 1.0);
    vs[5] = 0.0;
    CHECK_THROWS_AS(fit_decay(ts, vs, 0.0, 3.0), NonPositiveSeries);
  }

  SECTION("too few samples rejected") {
    std::vector<double> t2(ts.begin(), ts.begin() + 5), v2(5, 1.0);
    CHECK_THROWS_AS(fit_decay(t2, v2, 0.0, 3.0), NonPositiveSeries);
  }
}

TEST_CASE("mass_integral") {
  GridSpec g = make_grid(1, 32);

  SECTION("steady state has unit mass") {
    State st(g);
    CHECK(mass_integral(st, params) == Catch::Approx(1.0).margin(1e-14));
  }

  SECTION("gamma = 3, zero-mean sigma keeps mass 1") {
    GasParameters gas{3.0};
    State st(g);
    st.sigma.at({1, 0, 0}) = Complex(0.05, 0.0);
    st.sigma.at({-1, 0, 0}) = Complex(0.05, 0.0);  // 0.1 cos(2 pi x)
    CHECK(mass_integral(st, gas) == Catch::Approx(1.0).margin(1e-14));
  }

  SECTION("positivity enforced") {
    State st(g);
    st.sigma.coeffs[0] = Complex(-2.0 / params.theta(), 0.0);
    CHECK_THROWS_AS(mass_integral(st, params), NonPhysicalDensity);
  }
}

TEST_CASE("poincare_ratio") {
  GridSpec g = make_grid(2, 32);

  SECTION("lowest mode is sharp") {
    ScalarField f(g);
    f.at({1, 0, 0}) = Complex(0.5, 0.0);
    f.at({-1, 0, 0}) = Complex(0.5, 0.0);
    CHECK(poincare_ratio(f) == Catch::Approx(1.0 / kTwoPi).margin(1e-14));
  }

  SECTION("zero-mean fields satisfy the sharp bound") {
    for (int seed = 0; seed < 5; ++seed) {
      State st = random_state(seed + 1, g, 2.0, 1.0, {});
      CHECK(poincare_ratio(st.sigma) <= 1.0 / kTwoPi + 1e-14);
    }
  }

  SECTION("constant field rejected") {
    ScalarField c(g);
    c.coeffs[0] = Complex(1.0, 0.0);
    CHECK_THROWS_AS(poincare_ratio(c), ZeroGradient);
  }
}

TEST_CASE("dissipativity_form") {
  GridSpec g = make_grid(2, 16);
  State coeff = random_state(3, g, 3.0, 1e-2, {});
  State arg = random_state(5, g, 2.0, 1.0, {});

  SECTION("zero coefficients give zero") {
    CHECK(dissipativity_form(State(g), arg, params, 2.0) == 0.0);
  }

  SECTION("linear in the coefficients") {
    const double one = dissipativity_form(coeff, arg, params, 2.0);
    const double two = dissipativity_form(2.0 * coeff, arg, params, 2.0);
    CHECK(std::abs(two - 2.0 * one) < 1e-12 * std::abs(one));
  }

  SECTION("bounded by the gradient sup times the squared norm") {
    for (int seed = 0; seed < 10; ++seed) {
      State c = random_state(seed + 10, g, 3.0, 1e-2, {});
      State a = random_state(seed + 50, g, 2.0, 1.0, {});
      const double form = std::abs(dissipativity_form(c, a, params, 2.0));
      const double bound = gradient_sup(c) * std::pow(sobolev_norm(a, 2.0), 2);
      CHECK(form <= 10.0 * bound);
    }
  }
}

TEST_CASE("commutator_norm_probe") {
  GridSpec g = make_grid(2, 16);

  SECTION("constant-coefficient states commute with multipliers") {
    State c(g);
    c.sigma.coeffs[0] = Complex(0.2, 0.0);
    c.velocity[0].coeffs[0] = Complex(-0.1, 0.0);
    c.velocity[1].coeffs[0] = Complex(0.3, 0.0);
    CHECK(commutator_norm_probe(c, params, 2.0, 4, 1) < 1e-12);
  }

  SECTION("linear scaling in the state") {
    State st = random_state(7, g, 3.0, 1e-2, {});
    const double one = commutator_norm_probe(st, params, 2.0, 4, 3);
    const double two = commutator_norm_probe(2.0 * st, params, 2.0, 4, 3);
    CHECK(two == Catch::Approx(2.0 * one).epsilon(1e-4));
  }
}

TEST_CASE("slaving_series") {
  GridSpec g = make_grid(2, 16);

  SECTION("steady trajectory raises") {
    Trajectory traj = evolve(State(g), params, 0.1, 0.05);
    std::vector<FrameFunctionals> frames;
    for (const auto& st : traj.states) frames.push_back(solve_frame(st, params, 4));
    CHECK_THROWS_AS(slaving_series(traj, frames, 2.0), DegenerateDenominator);
  }

  SECTION("linear-regime ratio stays below 10") {
    RandomStateOptions opt;
    opt.sigma_sup_cap = 0.5 / params.theta();
    State x0 = random_state(3, g, 3.0, 1e-3, opt);
    Trajectory traj = evolve(x0, params, 1.0, 0.05);
    std::vector<FrameFunctionals> frames;
    const FrameFunctionals* warm = nullptr;
    for (const auto& st : traj.states) {
      frames.push_back(solve_frame(st, params, 4, FrameSolveMethod::Auto, warm));
      warm = &frames.back();
    }
    DecayReport r = slaving_series(traj, frames, 2.0);
    CHECK(r.fitted_prefactor < 10.0);
  }
}

TEST_CASE("continuity and momentum residuals") {
  GridSpec g = make_grid(2, 16);

  SECTION("steady trajectory has zero residual") {
    State st(g);
    st.sigma.coeffs[0] = Complex(0.01, 0.0);
    Trajectory traj;
    traj.grid = g;
    traj.params = params;
    traj.dt = 0.1;
    for (int i = 0; i < 4; ++i) {
      traj.times.push_back(0.1 * i);
      traj.states.push_back(st);
    }
    CHECK(continuity_residual(traj, params) == 0.0);
    CHECK(momentum_residual(traj, params) == 0.0);
  }

  SECTION("residual is second order in dt") {
    RandomStateOptions opt;
    opt.sigma_sup_cap = 0.5 / params.theta();
    State x0 = random_state(11, g, 3.0, 1e-2, opt);
    auto residuals = [&](double dt) {
      Trajectory traj = evolve(x0, params, 0.32, dt);
      return std::pair{continuity_residual(traj, params), momentum_residual(traj, params)};
    };
    auto [c1, m1] = residuals(0.02);
    auto [c2, m2] = residuals(0.01);
    CHECK(c1 / c2 == Catch::Approx(4.0).epsilon(0.1));
    CHECK(m1 / m2 == Catch::Approx(4.0).epsilon(0.1));
  }
}
