#include "spdeapprox/gaussian_lift.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "spdeapprox/correction.hpp"
#include "spdeapprox/errors.hpp"

namespace spdeapprox {

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

double parity(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

bool same_offset(double a, double b) {
  return std::abs(a - b) <= 1e-10 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

ModeState ModeState::zero(const CutoffScheme& scheme, double eps, int components, int max_mode,
                          std::uint64_t seed) {
  if (components < 1 || max_mode < 0) throw ValidationError("ModeState needs n >= 1 and N >= 0");
  if (!(eps > 0.0)) throw ValidationError("ModeState needs eps > 0");
  ModeState s;
  s.n = components;
  s.N = max_mode;
  s.eps = eps;
  s.seed = seed;
  s.scheme = scheme;
  s.xi.assign((static_cast<std::size_t>(max_mode) + 1) * components, {0.0, 0.0});
  return s;
}

std::complex<double> ModeState::mode(int j, int k) const {
  const auto v = xi[static_cast<std::size_t>(std::abs(k)) * n + j];
  return k < 0 ? std::conj(v) : v;
}

ModeState evolve_modes(const ModeState& state, double dt,
                       std::span<const std::complex<double>> draws) {
  if (!(dt > 0.0)) throw ValidationError("evolve_modes needs dt > 0");
  const std::size_t need = (static_cast<std::size_t>(state.N) + 1) * state.n;
  if (draws.size() < need)
    throw ValidationError("evolve_modes: expected " + std::to_string(need) + " draws, got " +
                          std::to_string(draws.size()));
  ModeState out = state;
  const double sdt = std::sqrt(dt);
  for (int j = 0; j < state.n; ++j) out.at(j, 0) += sdt * draws[j].real();
  for (int k = 1; k <= state.N; ++k) {
    const double rate = -laplacian_multiplier(state.scheme, k, state.eps);
    const double decay = std::exp(-rate * dt);
    const double amp = std::sqrt(-std::expm1(-2.0 * rate * dt));
    for (int j = 0; j < state.n; ++j)
      out.at(j, k) = decay * out.at(j, k) + amp * draws[static_cast<std::size_t>(k) * state.n + j];
  }
  out.time = state.time + dt;
  return out;
}

SpectralField x_spectral(const ModeState& state) {
  SpectralField field(state.n, state.N);
  for (int k = 0; k <= state.N; ++k) {
    const double q = kSqrt2Pi * mode_coefficient(state.scheme, state.eps, k);
    for (int j = 0; j < state.n; ++j) field.set(j, k, q * state.mode(j, k));
  }
  return field;
}

GridField assemble_X(const ModeState& state, int M) { return to_physical(x_spectral(state), M); }

int LiftSample::find_offset(double u) const {
  for (std::size_t i = 0; i < offsets.size(); ++i)
    if (same_offset(offsets[i], u)) return static_cast<int>(i);
  return -1;
}

LiftSample lift_XX(const ModeState& state, int M, const std::vector<double>& offsets) {
  const int n = state.n;
  const int N = state.N;
  if (M < 2 * N + 1) throw ValidationError("lift_XX needs M >= 2N + 1");
  const double h = 2.0 * std::numbers::pi / M;

  LiftSample lift;
  lift.n = n;
  lift.N = N;
  lift.eps = state.eps;
  lift.time = state.time;
  lift.offsets.push_back(h);
  for (double u : offsets)
    if (lift.find_offset(u) < 0) lift.offsets.push_back(u);

  const int width = 2 * N + 1;       // modes of X
  const int out_width = 4 * N + 1;   // modes of XX(., . + u)
  // A[a][k + N] = q^k xi^k_a
  std::vector<std::vector<std::complex<double>>> A(n, std::vector<std::complex<double>>(width));
  for (int k = -N; k <= N; ++k) {
    const double q = mode_coefficient(state.scheme, state.eps, std::abs(k));
    for (int a = 0; a < n; ++a) A[a][k + N] = q * state.mode(a, k);
  }

  const std::size_t n_off = lift.offsets.size();
  lift.offset_spectra.assign(n_off, SpectralField(n * n, 2 * N));
  lift.offset_values.assign(n_off, GridField(n * n, M));

  std::vector<std::complex<double>> P(out_width), Q(out_width), Em1(width), Eout(out_width);
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(M));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const auto& Aa = A[a];
      const auto& Bb = A[b];
      // P_m = sum_{k+l=m} l B_l A_k does not depend on the offset.
      std::fill(P.begin(), P.end(), std::complex<double>{});
      for (int l = -N; l <= N; ++l) {
        const std::complex<double> lb = static_cast<double>(l) * Bb[l + N];
        if (l == 0) continue;
        for (int k = -N; k <= N; ++k) P[k + l + 2 * N] += lb * Aa[k + N];
      }
      for (std::size_t o = 0; o < n_off; ++o) {
        const double u = lift.offsets[o];
        for (int l = -N; l <= N; ++l) Em1[l + N] = std::polar(1.0, l * u) - 1.0;
        for (int m = -2 * N; m <= 2 * N; ++m) Eout[m + 2 * N] = std::polar(1.0, m * u) - 1.0;
        std::fill(Q.begin(), Q.end(), std::complex<double>{});
        for (int l = -N; l <= N; ++l) {
          const std::complex<double> eb = Em1[l + N] * Bb[l + N];
          for (int k = -N; k <= N; ++k) Q[k + l + 2 * N] += eb * Aa[k + N];
        }
        auto& spec = lift.offset_spectra[o];
        const int comp = a * n + b;
        std::fill(buf.begin(), buf.end(), std::complex<double>{});
        for (int m = -2 * N; m <= 2 * N; ++m) {
          const std::size_t i = static_cast<std::size_t>(m + 2 * N);
          std::complex<double> c;
          if (m == 0)
            c = std::complex<double>(0.0, u) * P[i] - Q[i];
          else
            c = Eout[i] / static_cast<double>(m) * P[i] - Q[i];
          spec.set_raw(comp, m, kSqrt2Pi * c);
          buf[static_cast<std::size_t>(((m % M) + M) % M)] += parity(m) * c;
        }
        fft::backward_complex(buf);
        auto& grid = lift.offset_values[o];
        for (int p = 0; p < M; ++p) {
          grid(comp, p) = buf[p].real();
          lift.imag_residual = std::max(lift.imag_residual, std::abs(buf[p].imag()));
        }
      }
    }

  const GridField X = assemble_X(state, M);
  Matrix values(M, n);
  for (int m = 0; m < M; ++m)
    for (int j = 0; j < n; ++j) values(m, j) = X(j, m);
  std::vector<Matrix> inc(static_cast<std::size_t>(M), Matrix(n, n));
  const auto& step = lift.offset_values[0];
  for (int m = 0; m < M; ++m)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) inc[m](a, b) = step(a * n + b, m);
  lift.path = RoughPathSample(std::move(values), std::move(inc));
  return lift;
}

std::vector<double> scheme_offsets(const CutoffScheme& scheme, double eps) {
  std::vector<double> out;
  for (const auto& atom : scheme.mu.atoms())
    if (atom.location != 0.0) out.push_back(eps * atom.location);
  return out;
}

SpectralField d_eps_xx_spectral(const LiftSample& lift, const CutoffScheme& scheme, double eps) {
  if (!(eps > 0.0)) throw ValidationError("d_eps_xx needs eps > 0");
  SpectralField out(lift.n * lift.n, 2 * lift.N);
  for (const auto& atom : scheme.mu.atoms()) {
    if (atom.location == 0.0) continue;  // XX(x, x) = 0
    const int o = lift.find_offset(eps * atom.location);
    if (o < 0)
      throw ValidationError("lift has no offset " + std::to_string(eps * atom.location) +
                            " required by the scheme's measure");
    SpectralField term = lift.offset_spectra[o];
    term *= atom.weight / eps;
    out += term;
  }
  return out;
}

GridField d_eps_xx(const LiftSample& lift, const CutoffScheme& scheme, double eps) {
  if (!(eps > 0.0)) throw ValidationError("d_eps_xx needs eps > 0");
  const int M = lift.path.points();
  GridField out(lift.n * lift.n, M);
  for (const auto& atom : scheme.mu.atoms()) {
    if (atom.location == 0.0) continue;
    const int o = lift.find_offset(eps * atom.location);
    if (o < 0)
      throw ValidationError("lift has no offset " + std::to_string(eps * atom.location) +
                            " required by the scheme's measure");
    const auto& g = lift.offset_values[o];
    for (int c = 0; c < out.components(); ++c)
      for (int m = 0; m < M; ++m) out(c, m) += atom.weight / eps * g(c, m);
  }
  return out;
}

double fluctuation_statistic(const LiftSample& lift, const CutoffScheme& scheme, double eps,
                             double t, double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw ValidationError("fluctuation_statistic needs 0 < alpha < 1/2");
  SpectralField d = d_eps_xx_spectral(lift, scheme, eps);
  const double lam = lift.N >= 1 ? lambda_eps(scheme, eps, t, lift.N) : 0.0;
  for (int a = 0; a < lift.n; ++a) {
    const int c = a * lift.n + a;
    d.set_raw(c, 0, d(c, 0) - kSqrt2Pi * lam);
  }
  return sobolev_minus_alpha_norm(d, alpha);
}

}  // namespace spdeapprox
