#include <catch2/catch_amalgamated.hpp>

#include "eulerlab/dynamics.hpp"

using namespace eulerlab;

TEST_CASE("rho_sigma_transform") {
  GridSpec g = make_grid(1, 16);
  GasParameters air;  // gamma 1.4

  SECTION("rho = 1 maps to sigma = 0") {
    std::vector<double> ones(g.total_samples(), 1.0);
    ScalarField rho = from_physical(g, ones);
    ScalarField sig = rho_sigma_transform(rho, DensityTransform::RhoToSigma, air);
    CHECK(sobolev_norm(sig, 0.0) < 1e-14);
  }

  SECTION("gamma = 3 linearizes the map") {
    GasParameters gas{3.0};
    CHECK(gas.theta() == 1.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.9, 1.1);
    std::vector<double> rho_s(g.total_samples());
    for (auto& v : rho_s) v = u(rng);
    ScalarField rho = from_physical(g, rho_s);
    ScalarField sig = rho_sigma_transform(rho, DensityTransform::RhoToSigma, gas);
    const auto sig_phys = to_physical(sig);
    double err = 0.0;
    for (std::size_t p = 0; p < rho_s.size(); ++p)
      err = std::max(err, std::abs(sig_phys[p] - (rho_s[p] - 1.0)));
    CHECK(err < 1e-13);
  }

  SECTION("round trip, gamma = 1.4") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.9, 1.1);
    std::vector<double> rho_s(g.total_samples());
    for (auto& v : rho_s) v = u(rng);
    ScalarField rho = from_physical(g, rho_s);
    ScalarField back = rho_sigma_transform(
        rho_sigma_transform(rho, DensityTransform::RhoToSigma, air), DensityTransform::SigmaToRho,
        air);
    const auto bp = to_physical(back);
    double err = 0.0;
    for (std::size_t p = 0; p < rho_s.size(); ++p) err = std::max(err, std::abs(bp[p] - rho_s[p]));
    CHECK(err < 1e-12);
  }

  SECTION("positivity violations rejected") {
    std::vector<double> bad(g.total_samples(), -0.5);
    ScalarField rho = from_physical(g, bad);
    CHECK_THROWS_AS(rho_sigma_transform(rho, DensityTransform::RhoToSigma, air),
                    NonPhysicalDensity);
    std::vector<double> sig_bad(g.total_samples(), -2.0 / air.theta());
    ScalarField sig = from_physical(g, sig_bad);
    CHECK_THROWS_AS(rho_sigma_transform(sig, DensityTransform::SigmaToRho, air),
                    NonPhysicalDensity);
  }
}

TEST_CASE("apply_B") {
  GridSpec g = make_grid(2, 16);
  GasParameters params;
  State coeff = random_state(3, g, 2.0, 0.1, {});
  State arg = random_state(5, g, 2.0, 1.0, {});

  SECTION("zero coefficients give zero") {
    CHECK(sobolev_norm(apply_B(State(g), arg, params), 2.0) == 0.0);
  }

  SECTION("constant argument is annihilated") {
    State c(g);
    c.sigma.coeffs[0] = Complex(0.3, 0.0);
    c.velocity[0].coeffs[0] = Complex(-0.2, 0.0);
    CHECK(sobolev_norm(apply_B(coeff, c, params), 2.0) < 1e-14);
  }

  SECTION("linear in coefficients") {
    State two = 2.0 * coeff;
    State diff = apply_B(two, arg, params) - 2.0 * apply_B(coeff, arg, params);
    CHECK(sobolev_norm(diff, 2.0) < 1e-13);
  }

  SECTION("additive in the argument") {
    State arg2 = random_state(7, g, 2.0, 1.0, {});
    State lhs = apply_B(coeff, arg + arg2, params);
    State rhs = apply_B(coeff, arg, params) + apply_B(coeff, arg2, params);
    CHECK(sobolev_norm(lhs - rhs, 2.0) < 1e-12);
  }

  SECTION("grid mismatch rejected") {
    State other(make_grid(2, 32));
    CHECK_THROWS_AS(apply_B(coeff, other, params), GridMismatch);
  }

  SECTION("output is real (Hermitian symmetric)") {
    CHECK(apply_B(coeff, arg, params).max_hermitian_asymmetry() < 1e-12);
  }
}

TEST_CASE("apply_B_adjoint is the L2 adjoint") {
  GridSpec g = make_grid(2, 16);
  GasParameters params;
  State coeff = random_state(11, g, 2.0, 0.1, {});
  State x = random_state(13, g, 2.0, 1.0, {});
  State y = random_state(17, g, 2.0, 1.0, {});

  auto l2_inner = [&](const State& a, const State& b) {
    double s = 0.0;
    for (std::size_t p = 0; p < g.total_samples(); ++p) {
      s += (std::conj(a.sigma.coeffs[p]) * b.sigma.coeffs[p]).real();
      for (int d = 0; d < g.dim; ++d)
        s += (std::conj(a.velocity[d].coeffs[p]) * b.velocity[d].coeffs[p]).real();
    }
    return s;
  };

  const double lhs = l2_inner(y, apply_B(coeff, x, params));
  const double rhs = l2_inner(apply_B_adjoint(coeff, y, params), x);
  CHECK(std::abs(lhs - rhs) < 1e-12 * (std::abs(lhs) + 1.0));
}

TEST_CASE("full_rhs") {
  GridSpec g = make_grid(2, 16);
  GasParameters params;

  SECTION("steady state") {
    CHECK(sobolev_norm(full_rhs(State(g), params), 2.0) == 0.0);
  }

  SECTION("single shear mode") {
    // sigma = 0, U = eta cos(2 pi x1) with eta = e2 (divergence free)
    State st(g);
    st.velocity[1].at({1, 0, 0}) = Complex(0.5, 0.0);
    st.velocity[1].at({-1, 0, 0}) = Complex(0.5, 0.0);
    State r = full_rhs(st, params);
    // sigma equation: -div U = 0 and -U.grad sigma = 0
    CHECK(sobolev_norm(r.sigma, 0.0) < 1e-14);
    // U equation: -U - U.grad U; the convective term vanishes since
    // U.grad = U2 d2 and U is x2-independent
    CHECK(sobolev_norm(r.velocity[1] + st.velocity[1], 0.0) < 1e-14);
    CHECK(sobolev_norm(r.velocity[0], 0.0) < 1e-14);
  }

  SECTION("Richardson: nonlinear part scales quadratically") {
    State base = random_state(19, g, 3.0, 1.0, {});
    auto nonlinear_norm = [&](double eps) {
      State st = eps * base;
      return sobolev_norm(full_rhs(st, params) - apply_A(st), 2.0);
    };
    const double r = nonlinear_norm(1e-3) / nonlinear_norm(5e-4);
    CHECK(r == Catch::Approx(4.0).epsilon(1e-3));
  }
}
