#include "spdeapprox/solver.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "spdeapprox/correction.hpp"
#include "spdeapprox/errors.hpp"

namespace spdeapprox {

namespace {

struct LinearFactors {
  std::vector<double> decay;   // e^{-nu k^2 f dt}
  std::vector<double> weight;  // exact-variance weight of the noise increment
};

LinearFactors linear_factors(const CutoffScheme& scheme, double eps, int N, double dt, double nu) {
  LinearFactors lf;
  lf.decay.resize(static_cast<std::size_t>(N) + 1);
  lf.weight.resize(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k <= N; ++k) {
    const double rate = -nu * laplacian_multiplier(scheme, k, eps);
    const double x = rate * dt;
    lf.decay[k] = std::exp(-x);
    lf.weight[k] = x > 0.0 ? std::sqrt(-std::expm1(-2.0 * x) / (2.0 * x)) : 1.0;
  }
  return lf;
}

Vector point(const GridField& g, int m) {
  Vector v(g.components());
  for (int j = 0; j < g.components(); ++j) v(j) = g(j, m);
  return v;
}

/// Physical noise field with coefficients h(eps k) sqrt(dt) Z_k.
GridField noise_field(const std::vector<double>& h, double dt, int n, int N, int M,
                      std::span<const std::complex<double>> draws) {
  if (draws.size() < (static_cast<std::size_t>(N) + 1) * n)
    throw ValidationError("not enough noise draws for one step");
  SpectralField eta(n, N);
  const double s = std::sqrt(dt);
  for (int k = 0; k <= N; ++k)
    for (int j = 0; j < n; ++j) eta.set(j, k, h[k] * s * draws[static_cast<std::size_t>(k) * n + j]);
  return to_physical(eta, M);
}

/// theta(x) eta(x) with theta given as an n*n-component field.
GridField apply_theta_field(const GridField& theta, const GridField& eta) {
  const int n = eta.components();
  GridField out(n, eta.points());
  for (int m = 0; m < eta.points(); ++m)
    for (int a = 0; a < n; ++a) {
      double s = 0.0;
      for (int b = 0; b < n; ++b) s += theta(a * n + b, m) * eta(b, m);
      out(a, m) = s;
    }
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

int SolverConfig::steps() const { return static_cast<int>(std::llround(T / dt)); }

int SolverConfig::dealias_mode() const {
  return dealias ? static_cast<int>(std::floor(dealias_fraction * N + 1e-12)) : N;
}

void SolverConfig::validate() const {
  if (!(eps > 0.0)) throw ValidationError("solver: eps must be > 0");
  if (N < 1) throw ValidationError("solver: N must be >= 1");
  if (M < 2 * N + 1) throw ValidationError("solver: M must be >= 2N + 1");
  if (!(dt > 0.0) || !(T > 0.0)) throw ValidationError("solver: dt and T must be > 0");
  if (std::abs(steps() * dt - T) > 1e-9 * T) throw ValidationError("solver: T must be a multiple of dt");
  if (!(nu > 0.0)) throw ValidationError("solver: nu must be > 0");
  if (dealias && !(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
    throw ValidationError("solver: dealias fraction must lie in (0, 1]");
  if (!(blowup_cap > 0.0)) throw ValidationError("solver: blowup cap must be > 0");
  model.validate();
  if (conservation_form && !model.has_potential())
    throw ValidationError("solver: conservation form needs a model potential");
  if (initial.components() != 0 &&
      (initial.components() != model.n || initial.max_mode() != N))
    throw ValidationError("solver: initial data must have n components and N modes");
  for (double t : record_times)
    if (t < 0.0 || t > T + 1e-12) throw ValidationError("solver: record times must lie in [0, T]");
}

std::string SolverConfig::hash() const {
  std::ostringstream os;
  os.precision(17);
  os << scheme.to_json().dump() << '|' << eps << '|' << N << '|' << M << '|' << dt << '|' << T
     << '|' << nu << '|' << model.name << '|' << model.n << '|' << dealias << '|'
     << dealias_fraction << '|' << conservation_form << '|' << blowup_cap << '|' << seed << '|'
     << sample << '|' << static_cast<bool>(extra_drift);
  for (double t : record_times) os << '|' << t;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(os.str())));
  return buf;
}

Stepper::Stepper(SolverConfig config) : cfg_(std::move(config)) {
  cfg_.validate();
  const int N = cfg_.N;
  const auto lf = linear_factors(cfg_.scheme, cfg_.eps, N, cfg_.dt, cfg_.nu);
  decay_ = lf.decay;
  weight_ = lf.weight;
  deriv_.resize(static_cast<std::size_t>(N) + 1);
  noise_.resize(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k <= N; ++k) {
    deriv_[k] = derivative_multiplier(cfg_.scheme, k, cfg_.eps);
    noise_[k] = noise_multiplier(cfg_.scheme, k, cfg_.eps);
  }
}

SpectralField Stepper::drift(const SpectralField& u, const GridField& ugrid) const {
  const int n = cfg_.model.n;
  const int M = cfg_.M;
  const int N = cfg_.N;
  const auto D = [this](int k) { return k >= 0 ? deriv_[k] : std::conj(deriv_[-k]); };

  GridField local(n, M);
  GridField product(n, M);
  const bool extra = static_cast<bool>(cfg_.extra_drift);
  GridField du;
  if (!cfg_.conservation_form) du = to_physical(apply_multiplier(u, D), M);
  for (int m = 0; m < M; ++m) {
    const Vector v = point(ugrid, m);
    Vector f = cfg_.model.F(v);
    if (extra) f += cfg_.extra_drift(v);
    const Vector p = cfg_.conservation_form ? cfg_.model.potential(v)
                                            : Vector(cfg_.model.G(v) * point(du, m));
    for (int j = 0; j < n; ++j) {
      local(j, m) = f(j);
      product(j, m) = p(j);
    }
  }
  SpectralField transport = to_spectral(product, N);
  if (cfg_.conservation_form) transport = apply_multiplier(transport, D);
  const int keep = cfg_.dealias_mode();
  for (int j = 0; j < n; ++j)
    for (int k = keep + 1; k <= N; ++k) transport.set(j, k, 0.0);
  SpectralField out = to_spectral(local, N);
  out += transport;
  return out;
}

SpectralField Stepper::noise_term(const GridField& ugrid,
                                  std::span<const std::complex<double>> draws) const {
  const int n = cfg_.model.n;
  const int M = cfg_.M;
  const GridField eta = noise_field(noise_, cfg_.dt, n, cfg_.N, M, draws);
  GridField theta(n * n, M);
  for (int m = 0; m < M; ++m) {
    const Matrix th = cfg_.model.theta(point(ugrid, m));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) theta(a * n + b, m) = th(a, b);
  }
  return to_spectral(apply_theta_field(theta, eta), cfg_.N);
}

SpectralField Stepper::step(const SpectralField& u, std::span<const std::complex<double>> draws) const {
  const GridField ugrid = to_physical(u, cfg_.M);
  const SpectralField nl = drift(u, ugrid);
  const SpectralField s = noise_term(ugrid, draws);
  SpectralField out(u.components(), cfg_.N);
  const double dt = cfg_.dt;
  for (int j = 0; j < u.components(); ++j)
    for (int k = 0; k <= cfg_.N; ++k)
      out.set(j, k, decay_[k] * (u(j, k) + dt * nl(j, k)) + weight_[k] * s(j, k));
  return out;
}

SpectralField step(const SpectralField& u, const SolverConfig& config,
                   std::span<const std::complex<double>> draws) {
  return Stepper(config).step(u, draws);
}

Trajectory simulate(const SolverConfig& config, const NoiseStream& noise) {
  const Stepper stepper(config);
  const SolverConfig& cfg = stepper.config();
  const int steps = cfg.steps();
  const int n = cfg.model.n;

  std::vector<double> record = cfg.record_times.empty() ? std::vector<double>{cfg.T} : cfg.record_times;
  std::vector<int> record_steps;
  for (double t : record) record_steps.push_back(static_cast<int>(std::llround(t / cfg.dt)));

  Trajectory traj;
  traj.seed = noise.master_seed();
  traj.sample = noise.sample();
  traj.config_hash = cfg.hash();
  traj.end_time = cfg.T;

  SpectralField u = cfg.initial.components() == 0 ? SpectralField(n, cfg.N) : cfg.initial;
  for (int s = 0;; ++s) {
    const GridField ugrid = to_physical(u, cfg.M);
    double sup = 0.0;
    for (int j = 0; j < n; ++j)
      for (double v : ugrid.component(j)) {
        if (!std::isfinite(v)) throw NumericalAbort("non-finite solution value", s * cfg.dt);
        sup = std::max(sup, std::abs(v));
      }
    if (sup > cfg.blowup_cap) {
      traj.truncated = true;
      traj.end_time = s * cfg.dt;
      break;
    }
    for (std::size_t r = 0; r < record_steps.size(); ++r)
      if (record_steps[r] == s) {
        traj.times.push_back(record[r]);
        traj.snapshots.push_back(ugrid);
        traj.spectra.push_back(u);
      }
    if (s == steps) break;
    const auto draws = noise.mode_draws(static_cast<std::uint64_t>(s), n, cfg.N);
    u = stepper.step(u, draws);
  }
  return traj;
}

Trajectory simulate(const SolverConfig& config) {
  return simulate(config, NoiseStream(config.seed, config.sample));
}

GridField stochastic_convolution(const std::vector<GridField>& theta_path,
                                 const CutoffScheme& scheme, double eps, int N, double dt,
                                 const NoiseStream& noise, double nu) {
  if (theta_path.empty()) throw ValidationError("stochastic_convolution needs at least one step");
  const int M = theta_path.front().points();
  const int nn = theta_path.front().components();
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(nn))));
  if (n * n != nn) throw ValidationError("theta path must have n*n components");
  if (M < 2 * N + 1) throw ValidationError("stochastic_convolution needs M >= 2N + 1");
  const auto lf = linear_factors(scheme, eps, N, dt, nu);
  std::vector<double> h(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k <= N; ++k) h[k] = noise_multiplier(scheme, k, eps);

  SpectralField psi(n, N);
  for (std::size_t s = 0; s < theta_path.size(); ++s) {
    const auto& theta = theta_path[s];
    if (theta.points() != M || theta.components() != nn)
      throw ValidationError("theta path fields must share one grid");
    const auto draws = noise.mode_draws(s, n, N);
    const SpectralField S = to_spectral(apply_theta_field(theta, noise_field(h, dt, n, N, M, draws)), N);
    SpectralField next(n, N);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k <= N; ++k) next.set(j, k, lf.decay[k] * psi(j, k) + lf.weight[k] * S(j, k));
    psi = std::move(next);
  }
  return to_physical(psi, M);
}

double remainder_diagnostic(const GridField& psi, const GridField& theta_now,
                            const GridField& X_now, double gamma, int stride) {
  const int n = psi.components();
  const int M = psi.points();
  if (X_now.points() != M || theta_now.points() != M)
    throw ValidationError("remainder_diagnostic: fields must share one grid");
  if (X_now.components() != n || theta_now.components() != n * n)
    throw ValidationError("remainder_diagnostic: component counts do not match");
  if (stride < 1) throw ValidationError("remainder_diagnostic: stride must be >= 1");
  double worst = 0.0;
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int a = 0; a < M; a += stride)
    for (int b = a + stride; b < M; b += stride) {
      double norm2 = 0.0;
      for (int i = 0; i < n; ++i) {
        double v = psi(i, b) - psi(i, a);
        for (int j = 0; j < n; ++j) v -= theta_now(i * n + j, a) * (X_now(j, b) - X_now(j, a));
        norm2 += v * v;
      }
      const double d = periodic_distance(GridField::point(a, M), GridField::point(b, M));
      worst = std::max(worst, std::sqrt(norm2) / std::pow(d, 2.0 * gamma));
    }
  return worst;
}

SolverConfig corrected_reference_config(const SolverConfig& config, double eps_ref) {
  const double Lambda = lambda_exact(config.scheme, config.nu).value;
  SolverConfig ref = config;
  ref.eps = eps_ref;
  ref.scheme = config.scheme.with_measure("central_difference",
                                          CutoffScheme::central_difference().mu);
  const TensorFn dG = config.model.DG;
  const MatrixFn theta = config.model.theta;
  const VectorFn previous = config.extra_drift;
  if (Lambda != 0.0) {
    ref.extra_drift = [dG, theta, Lambda, previous](const Vector& u) {
      Vector d = correction_term(dG, theta, Lambda, u);
      if (previous) d += previous(u);
      return d;
    };
  }
  return ref;
}

Trajectory corrected_reference(const SolverConfig& config, double eps_ref,
                               const NoiseStream& noise) {
  return simulate(corrected_reference_config(config, eps_ref), noise);
}

}  // namespace spdeapprox
