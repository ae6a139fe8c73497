#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "spdeapprox/correction.hpp"
#include "spdeapprox/errors.hpp"
#include "spdeapprox/gaussian_lift.hpp"
#include "spdeapprox/noise.hpp"

using namespace spdeapprox;

namespace {

const double kPi = std::numbers::pi;

ModeState sample_state(const CutoffScheme& s, double eps, int n, int N, double t, std::uint64_t sample) {
  const auto draws = NoiseStream(99, sample).mode_draws(0, n, N);
  return evolve_modes(ModeState::zero(s, eps, n, N), t, draws);
}

}  // namespace

TEST_CASE("noise streams are stateless and prefix-consistent") {
  const NoiseStream a(5, 3), b(5, 3), c(5, 4);
  const auto x = a.mode_draws(17, 2, 10);
  const auto y = b.mode_draws(17, 2, 10);
  const auto z = c.mode_draws(17, 2, 10);
  CHECK(x == y);
  CHECK(x != z);
  const auto shorter = a.mode_draws(17, 2, 4);
  for (std::size_t i = 0; i < shorter.size(); ++i) CHECK(shorter[i] == x[i]);
  CHECK(x[0].imag() == 0.0);
  CHECK(NoiseStream::draws_per_step(2, 10) == 42);
}

TEST_CASE("zero increments decay each mode deterministically") {
  const auto s = CutoffScheme::forward_difference();
  ModeState st = ModeState::zero(s, 0.1, 1, 6);
  st.at(0, 4) = {1.0, 0.5};
  st.at(0, 0) = 0.3;
  const std::vector<std::complex<double>> zero(7, 0.0);
  const ModeState out = evolve_modes(st, 0.01, zero);
  CHECK(std::abs(out.mode(0, 4) - std::exp(-16.0 * 0.01) * std::complex<double>(1.0, 0.5)) < 1e-15);
  CHECK(out.mode(0, 0).real() == 0.3);
  CHECK(out.time == doctest::Approx(0.01));
  CHECK_THROWS_AS(evolve_modes(st, 0.0, zero), ValidationError);
}

TEST_CASE("assembled path: zero state and single cosine mode") {
  const auto s = CutoffScheme::forward_difference();
  ModeState st = ModeState::zero(s, 0.1, 1, 8);
  CHECK(assemble_X(st, 32).sup_norm() == 0.0);
  st.at(0, 3) = {0.0, 2.0};
  const GridField g = assemble_X(st, 32);
  const double q = mode_coefficient(s, 0.1, 3);
  for (int m = 0; m < 32; ++m) {
    const double x = GridField::point(m, 32);
    CHECK(g(0, m) == doctest::Approx(-4.0 * q * std::sin(3.0 * x)).epsilon(1e-12));
  }
}

TEST_CASE("mode variance and Markov consistency by Monte Carlo") {
  const auto s = CutoffScheme::forward_difference();
  const int samples = 4000;
  const double t = 0.02;
  const int k = 5;
  double one = 0.0, one2 = 0.0, two = 0.0, two2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const NoiseStream ns(3, i);
    const ModeState a = evolve_modes(ModeState::zero(s, 0.1, 1, k), 2.0 * t, ns.mode_draws(0, 1, k));
    ModeState b = evolve_modes(ModeState::zero(s, 0.1, 1, k), t, ns.mode_draws(1, 1, k));
    b = evolve_modes(b, t, ns.mode_draws(2, 1, k));
    const double va = std::norm(a.mode(0, k)), vb = std::norm(b.mode(0, k));
    one += va;
    one2 += va * va;
    two += vb;
    two2 += vb * vb;
  }
  const double expect = mode_covariance(s, 0.1, k, 2.0 * t, 2.0 * t);
  const double m1 = one / samples, m2 = two / samples;
  const double se1 = std::sqrt((one2 / samples - m1 * m1) / samples);
  const double se2 = std::sqrt((two2 / samples - m2 * m2) / samples);
  CHECK(std::abs(m1 - expect) < 5.0 * se1);
  CHECK(std::abs(m2 - expect) < 5.0 * se2);
}

TEST_CASE("spatial variance of X matches the series") {
  const auto s = CutoffScheme::central_difference();
  const int N = 32, M = 128, samples = 400;
  const double t = 3.0;
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    const GridField g = assemble_X(sample_state(s, 0.05, 1, N, t, i), M);
    for (int m = 0; m < M; ++m) acc += g(0, m) * g(0, m);
  }
  double series = 0.0;
  for (int k = -N; k <= N; ++k) {
    const double q = mode_coefficient(s, 0.05, std::abs(k));
    series += q * q * mode_covariance(s, 0.05, std::abs(k), t, t);
  }
  // The k = 0 mode dominates (variance t / 2 pi), so a 10% band is several standard errors.
  CHECK(acc / (samples * M) == doctest::Approx(series).epsilon(0.1));
}

TEST_CASE("lift: zero offset, geometricity and reality for n = 1") {
  const auto s = CutoffScheme::forward_difference();
  const int M = 256;
  const ModeState st = sample_state(s, 1.0 / 16, 1, 64, 0.5, 1);
  const LiftSample lift = lift_XX(st, M, {0.0, 1.0 / 16});
  CHECK(lift.offset_values[lift.find_offset(0.0)].sup_norm() == 0.0);
  CHECK(lift.imag_residual < 1e-10);
  const GridField X = assemble_X(st, M);
  for (double u : {2.0 * kPi / M, 1.0 / 16}) {
    const auto& g = lift.offset_values[lift.find_offset(u)];
    const int shift = static_cast<int>(std::lround(u / (2.0 * kPi / M)));
    if (std::abs(shift * 2.0 * kPi / M - u) > 1e-12) continue;
    for (int m = 0; m < M; ++m) {
      const double d = X(0, (m + shift) % M) - X(0, m);
      CHECK(g(0, m) == doctest::Approx(0.5 * d * d).epsilon(1e-9).scale(1e-6));
    }
  }
}

TEST_CASE("lift matches direct quadrature of the iterated integral") {
  const auto s = CutoffScheme::forward_difference();
  const ModeState st = sample_state(s, 0.2, 2, 8, 0.3, 2);
  const int M = 64;
  const double u = 0.37;
  const LiftSample lift = lift_XX(st, M, {u});
  const auto& g = lift.offset_values[lift.find_offset(u)];
  for (int m : {0, 9, 33, 63}) {
    const Matrix q = oracle::iterated_integral(st, GridField::point(m, M), u, 64);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) CHECK(std::abs(g(a * 2 + b, m) - q(a, b)) < 1e-10);
  }
}

TEST_CASE("series values obey Chen and agree with grid composition") {
  const auto s = CutoffScheme::central_difference();
  const int M = 96;
  const double h = 2.0 * kPi / M;
  const ModeState st = sample_state(s, 0.1, 2, 30, 1.0, 3);
  const LiftSample lift = lift_XX(st, M, {3 * h, 5 * h, 8 * h});
  const auto& g3 = lift.offset_values[lift.find_offset(3 * h)];
  const auto& g5 = lift.offset_values[lift.find_offset(5 * h)];
  const auto& g8 = lift.offset_values[lift.find_offset(8 * h)];
  for (int m = 0; m < M - 8; m += 7) {
    const Vector d1 = lift.path.delta(m, m + 3), d2 = lift.path.delta(m + 3, m + 8);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double defect = g8(a * 2 + b, m) - g3(a * 2 + b, m) - g5(a * 2 + b, m + 3) - d1(a) * d2(b);
        CHECK(std::abs(defect) < 1e-12);
        CHECK(std::abs(xx_eval(lift.path, m, m + 8)(a, b) - g8(a * 2 + b, m)) < 1e-12);
      }
  }
}

TEST_CASE("D_eps XX: linearity, missing offsets, and central/forward means") {
  const auto fwd = CutoffScheme::forward_difference();
  const auto ctr = CutoffScheme::central_difference();
  const double eps = 0.125, t = 0.5;
  const int N = 64, M = 256;
  const ModeState st = sample_state(fwd, eps, 1, N, t, 4);
  const LiftSample lift = lift_XX(st, M, scheme_offsets(fwd, eps));
  const GridField d = d_eps_xx(lift, fwd, eps);
  const auto doubled = fwd.with_measure("double", fwd.mu.scaled(2.0));
  const GridField d2 = d_eps_xx(lift, doubled, eps);
  for (int m = 0; m < M; ++m) CHECK(d2(0, m) == 2.0 * d(0, m));
  CHECK_THROWS_AS(d_eps_xx(lift, ctr, eps), ValidationError);

  // Monte-Carlo means of the spatial average
  const int samples = 300;
  double mf = 0.0, mf2 = 0.0, mc = 0.0, mc2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const ModeState a = sample_state(fwd, eps, 1, N, t, 100 + i);
    const LiftSample lf = lift_XX(a, M, scheme_offsets(fwd, eps));
    const double vf = d_eps_xx_spectral(lf, fwd, eps)(0, 0).real() / std::sqrt(2.0 * kPi);
    ModeState b = a;
    b.scheme = ctr;
    const LiftSample lc = lift_XX(b, M, scheme_offsets(ctr, eps));
    const double vc = d_eps_xx_spectral(lc, ctr, eps)(0, 0).real() / std::sqrt(2.0 * kPi);
    mf += vf;
    mf2 += vf * vf;
    mc += vc;
    mc2 += vc * vc;
  }
  mf /= samples;
  mc /= samples;
  const double sef = std::sqrt((mf2 / samples - mf * mf) / samples);
  const double sec = std::sqrt((mc2 / samples - mc * mc) / samples);
  CHECK(std::abs(mf - lambda_eps(fwd, eps, t, N)) < 5.0 * sef);
  (void)sec;
  CHECK(std::abs(mc) < 1e-12);  // symmetric measure: cancels sample by sample
}

TEST_CASE("fluctuation statistic for a zero-correction scheme is the plain norm") {
  const auto ctr = CutoffScheme::central_difference();
  const double eps = 0.125;
  const ModeState st = sample_state(ctr, eps, 1, 32, 0.5, 5);
  const LiftSample lift = lift_XX(st, 128, scheme_offsets(ctr, eps));
  CHECK(fluctuation_statistic(lift, ctr, eps, 0.5, 0.45) ==
        doctest::Approx(sobolev_minus_alpha_norm(d_eps_xx_spectral(lift, ctr, eps), 0.45)).epsilon(1e-14));
  CHECK_THROWS_AS(fluctuation_statistic(lift, ctr, eps, 0.5, 0.5), ValidationError);
}
