#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "spdeapprox/rough_path.hpp"
#include "spdeapprox/schemes.hpp"
#include "spdeapprox/spectral.hpp"

namespace spdeapprox {

/// Fourier modes xi^k(t) of the Gaussian reference path
///   X(t, x) = sum_{|k|<=N} q^k xi^k(t) e^{ikx},
/// stored for k >= 0 only (xi^{-k} = conj xi^k). Each xi^k is centred complex Gaussian
/// with E[xi^k (xi^k)^*] = K_k^{t,t} Id; xi^0 is a real Brownian motion.
struct ModeState {
  int n = 1;
  int N = 0;
  double eps = 1.0;
  double time = 0.0;
  std::uint64_t seed = 0;
  CutoffScheme scheme;
  std::vector<std::complex<double>> xi;  // xi[k * n + j]

  static ModeState zero(const CutoffScheme& scheme, double eps, int components, int max_mode,
                        std::uint64_t seed = 0);

  std::complex<double> mode(int j, int k) const;  // any sign of k
  std::complex<double>& at(int j, int k) { return xi[static_cast<std::size_t>(k) * n + j]; }
};

/// Exact transition over dt: for k != 0
///   xi <- e^{-f(eps k) k^2 dt} xi + sqrt(1 - e^{-2 f(eps k) k^2 dt}) Z,
/// and xi^0 <- xi^0 + sqrt(dt) Re Z. `draws` uses the NoiseStream::mode_draws layout and
/// must hold at least (N+1) n values.
ModeState evolve_modes(const ModeState& state, double dt,
                       std::span<const std::complex<double>> draws);

/// Coefficients of X in the library's basis (sqrt(2 pi) q^k xi^k).
SpectralField x_spectral(const ModeState& state);
/// Grid values of X(t, .); M >= 2N + 1.
GridField assemble_X(const ModeState& state, int M);

/// Second-order lift of X at a fixed time.
struct LiftSample {
  int n = 1;
  int N = 0;
  double eps = 1.0;
  double time = 0.0;
  RoughPathSample path;  // X on the grid with XX(x_m, x_{m+1})
  std::vector<double> offsets;
  /// x -> XX(x, x+u) per offset; component a*n+b holds entry (a, b), modes up to 2N.
  std::vector<SpectralField> offset_spectra;
  std::vector<GridField> offset_values;
  /// Largest imaginary part met while summing the double series on the grid.
  double imag_residual = 0.0;

  /// Index of offset u (relative tolerance 1e-10) or -1.
  int find_offset(double u) const;
};

/// Evaluates XX(x, x+u) = int_x^{x+u} (X(z) - X(x)) (x) dX(z) for all grid x and every
/// offset by summing the double Fourier series grouped by k + l. The grid spacing
/// 2 pi / M is always added to the offsets (it builds `path`).
LiftSample lift_XX(const ModeState& state, int M, const std::vector<double>& offsets);

/// Offsets eps * z needed by the atoms of the scheme's measure (zero locations skipped).
std::vector<double> scheme_offsets(const CutoffScheme& scheme, double eps);

/// D_eps XX(x) = (1/eps) sum_a w_a XX(x, x + eps z_a), as coefficients (n*n components).
SpectralField d_eps_xx_spectral(const LiftSample& lift, const CutoffScheme& scheme, double eps);
/// Same on the grid.
GridField d_eps_xx(const LiftSample& lift, const CutoffScheme& scheme, double eps);

/// |D_eps XX(t, .) - Lambda_eps(t) Id|_{H^{-alpha}}, root-sum-square over matrix entries,
/// with Lambda_eps(t) truncated at the lift's mode count.
double fluctuation_statistic(const LiftSample& lift, const CutoffScheme& scheme, double eps,
                             double t, double alpha);

}  // namespace spdeapprox
