#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "spdeapprox/errors.hpp"
#include "spdeapprox/schemes.hpp"
#include "spdeapprox/spectral.hpp"

using namespace spdeapprox;

namespace {

const double kPi = std::numbers::pi;
const double kSqrt2Pi = std::sqrt(2.0 * kPi);

SpectralField random_field(int n, int N, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  SpectralField f(n, N);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k <= N; ++k) f.set(j, k, {g(gen), g(gen)});
  return f;
}

}  // namespace

TEST_CASE("a single mode is a shifted cosine on the grid") {
  const int M = 64;
  SpectralField f(1, 5);
  const cplx c(0.3, -0.7);
  f.set(0, 3, c);
  CHECK(f(0, -3) == std::conj(c));
  const GridField g = to_physical(f, M);
  for (int m = 0; m < M; ++m) {
    const double x = GridField::point(m, M);
    const double expect = 2.0 / kSqrt2Pi * std::real(c * std::exp(cplx(0.0, 3.0 * x)));
    CHECK(g(0, m) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(GridField::point(0, M) == doctest::Approx(-kPi));
}

TEST_CASE("grid and spectral transforms invert each other") {
  const SpectralField f = random_field(2, 20, 5);
  const GridField g = to_physical(f, 41);
  const SpectralField back = to_spectral(g, 20);
  for (int j = 0; j < 2; ++j)
    for (int k = -20; k <= 20; ++k) CHECK(std::abs(back(j, k) - f(j, k)) < 1e-12);
  CHECK(back.reality_defect() < 1e-14);
  CHECK_THROWS_AS(to_physical(f, 40), ValidationError);
  CHECK_THROWS_AS(to_spectral(g, 21), ValidationError);
}

TEST_CASE("L2 norm is the coefficient sum (Parseval)") {
  const SpectralField f = random_field(1, 12, 9);
  const GridField g = to_physical(f, 64);
  double grid_l2 = 0.0;
  for (int m = 0; m < 64; ++m) grid_l2 += g(0, m) * g(0, m) * g.spacing();
  CHECK(std::sqrt(grid_l2) == doctest::Approx(sobolev_minus_alpha_norm(f, 0.0)).epsilon(1e-12));
}

TEST_CASE("derivative multiplier of the exact scheme differentiates") {
  SpectralField f(1, 4);
  f.set(0, 2, {1.0, 0.0});
  const auto d = apply_multiplier(f, [](int k) { return cplx(0.0, k); });
  const GridField g = to_physical(d, 32);
  for (int m = 0; m < 32; ++m) {
    const double x = GridField::point(m, 32);
    CHECK(g(0, m) == doctest::Approx(-4.0 / kSqrt2Pi * std::sin(2.0 * x)).epsilon(1e-12));
  }
}

TEST_CASE("semigroup decays each mode by exp(-k^2 f t)") {
  const auto s = CutoffScheme::forward_difference();
  const SpectralField f = random_field(1, 8, 3);
  const SpectralField e = semigroup_apply(f, s, 0.1, 0.25);
  for (int k = -8; k <= 8; ++k)
    CHECK(std::abs(e(0, k) - std::exp(-0.25 * k * k) * f(0, k)) < 1e-15);
}

TEST_CASE("negative Sobolev norm weights") {
  SpectralField f(2, 3);
  f.set(0, 1, {1.0, 0.0});
  f.set(1, 3, {0.0, 2.0});
  const double expect = std::sqrt(2.0 * std::pow(2.0, -0.45) + 2.0 * 4.0 * std::pow(10.0, -0.45));
  CHECK(sobolev_minus_alpha_norm(f, 0.45) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("periodic distance and Holder estimates") {
  CHECK(periodic_distance(-3.0, 3.0) == doctest::Approx(2.0 * kPi - 6.0));
  CHECK(periodic_distance(0.5, 0.25) == doctest::Approx(0.25));
  GridField g(1, 256);
  for (int m = 0; m < 256; ++m) g(0, m) = std::sin(GridField::point(m, 256));
  const double lip = holder_seminorm_estimate(g, 1.0);
  CHECK(lip <= 1.0 + 1e-12);
  CHECK(lip > 0.99);
  CHECK(holder_seminorm_estimate(g, 0.5, 4) <= holder_seminorm_estimate(g, 0.5, 1));
  CHECK(grr_norm_estimate(g, 0.4, 2.0) > 0.0);
  GridField flat(1, 16);
  CHECK(holder_seminorm_estimate(flat, 0.3) == 0.0);
}

TEST_CASE("norm exponent ordering is enforced") {
  CHECK_NOTHROW(NormConfig::with_kappa(0.45, 0.4, 0.48, 0.03).validate());
  CHECK_THROWS_AS(NormConfig::with_kappa(0.45, 0.3, 0.48, 0.03).validate(), ValidationError);
  CHECK_THROWS_AS(NormConfig::with_kappa(0.49, 0.4, 0.48, 0.03).validate(), ValidationError);
  CHECK(NormConfig::with_kappa(0.45, 0.4, 0.48, 0.03).beta == doctest::Approx(0.46));
}

TEST_CASE("binary and CSV serialization") {
  const SpectralField f = random_field(2, 6, 1);
  std::stringstream ss;
  write_binary(ss, f);
  const SpectralField r = read_spectral_binary(ss);
  REQUIRE(r.components() == 2);
  REQUIRE(r.max_mode() == 6);
  for (int k = -6; k <= 6; ++k) CHECK(r(1, k) == f(1, k));

  const GridField g = to_physical(f, 16);
  std::stringstream gs;
  write_binary(gs, g);
  const GridField h = read_grid_binary(gs);
  for (int m = 0; m < 16; ++m) CHECK(h(0, m) == g(0, m));

  std::stringstream bad("XXXX");
  CHECK_THROWS_AS(read_grid_binary(bad), ValidationError);

  std::ostringstream csv;
  write_csv(csv, g);
  CHECK(csv.str().size() > 16);
}
