#include <catch2/catch_amalgamated.hpp>

#include "eulerlab/spectral.hpp"

using namespace eulerlab;

namespace {

std::vector<double> sample(const GridSpec& g, double (*f)(double, double, double)) {
  std::vector<double> out(g.total_samples());
  std::array<int, 3> n{1, 1, 1};
  for (int d = 0; d < g.dim; ++d) n[d] = g.n;
  std::size_t p = 0;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k) out[p++] = f(double(i) / g.n, double(j) / g.n, double(k) / g.n);
  return out;
}

}  // namespace

TEST_CASE("make_grid enumerates modes and dealias mask") {
  GridSpec g = make_grid(1, 8);
  CHECK(g.total_samples() == 8);
  CHECK(g.dealias_cutoff == 2);  // floor((2/3) * 4)
  CHECK(g.in_mask({2, 0, 0}));
  CHECK_FALSE(g.in_mask({3, 0, 0}));
  // lattice covers -4..3
  CHECK(g.in_lattice({-4, 0, 0}));
  CHECK(g.in_lattice({3, 0, 0}));
  CHECK_FALSE(g.in_lattice({4, 0, 0}));

  CHECK(make_grid(2, 32).total_samples() == 1024);
  CHECK_THROWS_AS(make_grid(3, 7), InvalidGrid);
  CHECK_THROWS_AS(make_grid(4, 8), InvalidGrid);
  CHECK_THROWS_AS(make_grid(2, 4), InvalidGrid);
}

TEST_CASE("retained mode set is symmetric under negation") {
  GridSpec g = make_grid(2, 16);
  for (std::size_t p = 0; p < g.total_samples(); ++p) {
    const auto xi = g.xi_of(p);
    if (!g.in_mask(xi)) continue;
    CHECK(g.in_mask({-xi[0], -xi[1], -xi[2]}));
  }
}

TEST_CASE("transform pair: constants, cosine, round trip") {
  GridSpec g = make_grid(2, 16);

  SECTION("constant field") {
    std::vector<double> s(g.total_samples(), 3.0);
    ScalarField f = from_physical(g, s);
    CHECK(std::abs(f.coeffs[0] - Complex(3.0, 0.0)) < 1e-14);
    double off = 0.0;
    for (std::size_t p = 1; p < f.coeffs.size(); ++p) off = std::max(off, std::abs(f.coeffs[p]));
    CHECK(off < 1e-14);
  }

  SECTION("cos(2 pi x1) has coeff 1/2 at xi = +-e1") {
    auto s = sample(g, +[](double x, double, double) { return std::cos(kTwoPi * x); });
    ScalarField f = from_physical(g, s);
    CHECK(std::abs(f.at({1, 0, 0}) - Complex(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(f.at({-1, 0, 0}) - Complex(0.5, 0.0)) < 1e-14);
  }

  SECTION("round trip on random samples") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> s(g.total_samples());
    for (auto& v : s) v = u(rng);
    const auto back = to_physical(from_physical(g, s));
    double err = 0.0;
    for (std::size_t p = 0; p < s.size(); ++p) err = std::max(err, std::abs(back[p] - s[p]));
    CHECK(err < 1e-12);
  }

  SECTION("shape mismatch rejected") {
    std::vector<double> wrong(7, 0.0);
    CHECK_THROWS_AS(from_physical(g, wrong), ShapeMismatch);
  }
}

TEST_CASE("spectral_derivative") {
  GridSpec g = make_grid(1, 16);

  ScalarField c(g);
  c.coeffs[0] = Complex(4.0, 0.0);
  CHECK(sobolev_norm(spectral_derivative(c, 0), 0.0) == 0.0);

  auto s = sample(g, +[](double x, double, double) { return std::sin(kTwoPi * x); });
  ScalarField f = from_physical(g, s);
  const auto d = to_physical(spectral_derivative(f, 0));
  auto expect = sample(g, +[](double x, double, double) { return kTwoPi * std::cos(kTwoPi * x); });
  double err = 0.0;
  for (std::size_t p = 0; p < d.size(); ++p) err = std::max(err, std::abs(d[p] - expect[p]));
  CHECK(err < 1e-12);

  ScalarField m(g);
  m.at({2, 0, 0}) = Complex(1.0, 0.0);
  CHECK(std::abs(spectral_derivative(m, 0).at({2, 0, 0}) - Complex(0.0, 2.0 * kTwoPi)) < 1e-14);

  CHECK_THROWS_AS(spectral_derivative(f, 1), Error);
}

TEST_CASE("sobolev_norm values") {
  GridSpec g = make_grid(1, 16);

  ScalarField c(g);
  c.coeffs[0] = Complex(2.0, 0.0);
  CHECK(std::abs(sobolev_norm(c, 0.0) - 2.0) < 1e-14);
  CHECK(std::abs(sobolev_norm(c, 3.5) - 2.0) < 1e-14);

  auto s = sample(g, +[](double x, double, double) { return std::cos(kTwoPi * x); });
  ScalarField f = from_physical(g, s);
  CHECK(std::abs(sobolev_norm(f, 0.0) - 1.0 / std::sqrt(2.0)) < 1e-13);
  CHECK(std::abs(sobolev_norm(f, 1.0) - std::sqrt((1.0 + 4.0 * M_PI * M_PI) / 2.0)) < 1e-13);
}

TEST_CASE("state norm is the sum of component norms") {
  GridSpec g = make_grid(2, 16);
  State st = random_state(5, g, 2.0, 1.0, {});
  double total = sobolev_norm(st.sigma, 2.0);
  for (const auto& u : st.velocity) total += sobolev_norm(u, 2.0);
  CHECK(std::abs(sobolev_norm(st, 2.0) - total) < 1e-14);
}

TEST_CASE("Parseval: physical L2 equals s=0 norm") {
  GridSpec g = make_grid(2, 16);
  State st = random_state(11, g, 2.0, 1.0, {});
  const auto phys = to_physical(st.sigma);
  double l2 = 0.0;
  for (double v : phys) l2 += v * v;
  l2 = std::sqrt(l2 / static_cast<double>(phys.size()));
  CHECK(std::abs(l2 - sobolev_norm(st.sigma, 0.0)) < 1e-12);
}

TEST_CASE("mean_project") {
  GridSpec g = make_grid(1, 16);

  ScalarField c(g);
  c.coeffs[0] = Complex(5.0, 0.0);
  auto [m, rest] = mean_project(c);
  CHECK(m == 5.0);
  CHECK(sobolev_norm(rest, 0.0) == 0.0);

  auto s = sample(g, +[](double x, double, double) { return 1.0 + std::cos(kTwoPi * x); });
  ScalarField f = from_physical(g, s);
  auto [m2, zm] = mean_project(f);
  CHECK(std::abs(m2 - 1.0) < 1e-14);
  CHECK(std::abs(zm.coeffs[0]) == 0.0);
  CHECK(std::abs(zm.at({1, 0, 0}) - Complex(0.5, 0.0)) < 1e-14);

  // idempotent and linear
  auto [m3, zm2] = mean_project(zm);
  CHECK(m3 == 0.0);
  CHECK(sobolev_norm(zm2 - zm, 0.0) == 0.0);
}

TEST_CASE("bessel_shift") {
  GridSpec g = make_grid(1, 16);

  ScalarField c(g);
  c.coeffs[0] = Complex(3.0, 0.0);
  CHECK(std::abs(bessel_shift(c, BesselShift::Raise).coeffs[0] - Complex(3.0, 0.0)) < 1e-15);

  ScalarField m(g);
  m.at({1, 0, 0}) = Complex(1.0, 0.0);
  CHECK(std::abs(bessel_shift(m, BesselShift::Raise).at({1, 0, 0}) - Complex(std::sqrt(2.0), 0.0)) <
        1e-14);

  State st = random_state(9, g, 2.0, 1.0, {});
  ScalarField round =
      bessel_shift(bessel_shift(st.sigma, BesselShift::Raise), BesselShift::Lower);
  CHECK(sobolev_norm(round - st.sigma, 0.0) < 1e-14);
}

TEST_CASE("S is an isometry in the paper-weight norms") {
  GridSpec g = make_grid(2, 16);
  State st = random_state(13, g, 2.0, 1.0, {});
  const double a = sobolev_norm(bessel_shift(st.sigma, BesselShift::Raise), 1.0, Weight::Paper);
  const double b = sobolev_norm(st.sigma, 2.0, Weight::Paper);
  CHECK(std::abs(a - b) < 1e-13 * b);
}

TEST_CASE("dealiased_product") {
  GridSpec g = make_grid(1, 32);

  SECTION("multiplying by one is the identity inside the mask") {
    std::vector<double> ones(g.total_samples(), 1.0);
    ScalarField one = from_physical(g, ones);
    State st = random_state(17, g, 2.0, 1.0, {});
    ScalarField masked = st.sigma;
    masked.apply_mask();
    CHECK(sobolev_norm(dealiased_product(one, st.sigma) - masked, 0.0) < 1e-13);
  }

  SECTION("cos^2 identity") {
    auto s = sample(g, +[](double x, double, double) { return std::cos(kTwoPi * x); });
    ScalarField f = from_physical(g, s);
    ScalarField p = dealiased_product(f, f);
    CHECK(std::abs(p.coeffs[0] - Complex(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(p.at({2, 0, 0}) - Complex(0.25, 0.0)) < 1e-14);
  }

  SECTION("refinement consistency N=32 vs N=64") {
    GridSpec fine = make_grid(1, 64);
    RandomStateOptions opt;
    opt.max_abs_mode = 10;  // coarse-grid mask cutoff
    State a = random_state(23, g, 2.0, 1.0, opt);
    State b = random_state(29, g, 2.0, 1.0, opt);
    ScalarField coarse = dealiased_product(a.sigma, b.sigma);

    auto embed = [&](const ScalarField& src) {
      ScalarField out(fine);
      for (std::size_t p = 0; p < src.coeffs.size(); ++p) out.at(g.xi_of(p)) = src.coeffs[p];
      return out;
    };
    ScalarField fp = dealiased_product(embed(a.sigma), embed(b.sigma));
    double err = 0.0;
    for (std::size_t p = 0; p < coarse.coeffs.size(); ++p) {
      const auto xi = g.xi_of(p);
      if (!g.in_mask(xi)) continue;
      err = std::max(err, std::abs(coarse.coeffs[p] - fp.at(xi)));
    }
    CHECK(err < 1e-12);
  }

  SECTION("grid mismatch rejected") {
    ScalarField a(g), b(make_grid(1, 16));
    CHECK_THROWS_AS(dealiased_product(a, b), GridMismatch);
  }
}

TEST_CASE("random_state") {
  GridSpec g = make_grid(2, 16);

  State a = random_state(7, g, 2.0, 0.01, {});
  State b = random_state(7, g, 2.0, 0.01, {});
  CHECK(sobolev_norm(a - b, 2.0) == 0.0);

  CHECK(std::abs(sobolev_norm(a, 2.0) - 0.01) < 1e-12);
  CHECK(std::abs(a.sigma.coeffs[0]) == 0.0);

  CHECK(a.max_hermitian_asymmetry() < 1e-14);
  // reality of physical samples
  const auto phys = to_physical(a.sigma);
  (void)phys;
}

TEST_CASE("operations preserve Hermitian symmetry") {
  GridSpec g = make_grid(2, 16);
  State st = random_state(31, g, 2.0, 1.0, {});
  const double scale = sobolev_norm(st.sigma, 0.0);
  CHECK(spectral_derivative(st.sigma, 1).max_hermitian_asymmetry() < 1e-12 * scale);
  CHECK(bessel_shift(st.sigma, BesselShift::Lower).max_hermitian_asymmetry() < 1e-12 * scale);
  CHECK(dealiased_product(st.sigma, st.velocity[0]).max_hermitian_asymmetry() < 1e-12 * scale);
}
