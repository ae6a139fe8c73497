#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spdeapprox/models.hpp"
#include "spdeapprox/noise.hpp"
#include "spdeapprox/schemes.hpp"
#include "spdeapprox/spectral.hpp"

namespace spdeapprox {

/// Approximating equation
///   du = (nu Delta_eps u + F(u) + G(u) D_eps u + extra_drift(u)) dt + theta(u) H_eps dW
/// on the circle, Galerkin-truncated to modes |k| <= N and evaluated pseudo-spectrally
/// on M grid points. With `conservation_form` the transport term is D_eps(potential(u)).
struct SolverConfig {
  CutoffScheme scheme = CutoffScheme::forward_difference();
  double eps = 0.125;
  int N = 64;
  int M = 192;
  double dt = 1e-4;
  double T = 0.1;
  double nu = 1.0;
  ModelFunctions model;
  bool dealias = true;
  double dealias_fraction = 2.0 / 3.0;
  bool conservation_form = false;
  /// Runs stop at the first step whose sup-norm exceeds this cap.
  double blowup_cap = 1e6;
  std::uint64_t seed = 0;
  std::uint64_t sample = 0;
  VectorFn extra_drift;  // optional
  std::vector<double> record_times;  // default: {T}
  SpectralField initial;             // default: zero

  int steps() const;
  int dealias_mode() const;
  void validate() const;
  /// FNV-1a hash of the numerical parameters, for run metadata.
  std::string hash() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<GridField> snapshots;
  std::vector<SpectralField> spectra;
  bool truncated = false;
  double end_time = 0.0;  // truncation time, or T
  std::uint64_t seed = 0;
  std::uint64_t sample = 0;
  std::string config_hash;
};

/// Precomputed per-mode factors for one configuration.
class Stepper {
 public:
  explicit Stepper(SolverConfig config);

  const SolverConfig& config() const { return cfg_; }

  /// Deterministic part N(u) = F(u) + G(u) D_eps u + extra_drift(u), as coefficients.
  SpectralField drift(const SpectralField& u, const GridField& ugrid) const;
  /// theta(u) H_eps dW for one step with unit complex draws Z (NoiseStream::mode_draws layout).
  SpectralField noise_term(const GridField& ugrid, std::span<const std::complex<double>> draws) const;

  /// Exponential Euler:
  ///   u_k <- e^{-nu k^2 f dt} (u_k + dt N_k) + w_k S_k,
  ///   w_k = sqrt((1 - e^{-2 nu k^2 f dt}) / (2 nu k^2 f dt))  (w_0 = 1),
  /// so the noise contribution carries the exact variance of the linear equation.
  SpectralField step(const SpectralField& u, std::span<const std::complex<double>> draws) const;

 private:
  SolverConfig cfg_;
  std::vector<double> decay_;
  std::vector<double> weight_;
  std::vector<std::complex<double>> deriv_;
  std::vector<double> noise_;
};

SpectralField step(const SpectralField& u, const SolverConfig& config,
                   std::span<const std::complex<double>> draws);

/// Runs from the initial data to T. Step s uses noise.mode_draws(s, n, N). Throws
/// NumericalAbort on non-finite values; truncates at the blowup cap.
Trajectory simulate(const SolverConfig& config, const NoiseStream& noise);
Trajectory simulate(const SolverConfig& config);  // NoiseStream(config.seed, config.sample)

/// Psi(T) = int_0^T S_eps(T - s) theta(s) H_eps dW(s) with left-point theta. `theta_path`
/// holds one n*n-component field (entry (a, b) at component a*n+b) per step.
GridField stochastic_convolution(const std::vector<GridField>& theta_path,
                                 const CutoffScheme& scheme, double eps, int N, double dt,
                                 const NoiseStream& noise, double nu = 1.0);

/// sup over grid pairs (indices multiples of stride) of
///   |Psi(y) - Psi(x) - theta(x)(X(y) - X(x))| / d(x, y)^{2 gamma}.
double remainder_diagnostic(const GridField& psi, const GridField& theta_now,
                            const GridField& X_now, double gamma, int stride = 1);

/// Configuration whose limit is the corrected equation for `config.scheme`: the same
/// model on a central-difference carrier with f and h kept, at eps_ref, plus the drift
///   -Lambda theta^j_k d_j G^i_l theta^l_k,   Lambda = lambda_exact(config.scheme, nu).
SolverConfig corrected_reference_config(const SolverConfig& config, double eps_ref);
Trajectory corrected_reference(const SolverConfig& config, double eps_ref,
                               const NoiseStream& noise);

}  // namespace spdeapprox
