#pragma once

// Periodic fields on [-pi, pi]. Basis convention, used everywhere:
//
//   u(x) = (1/sqrt(2 pi)) sum_k  u_hat(k) exp(i k x),   x_m = -pi + 2 pi m / M.
//
// With this normalization the heat kernel is (1/sqrt(2 pi)) sum_k e^{-t k^2} e^{ikx},
// the L2 inner product is sum_k |u_hat(k)|^2, and a cylindrical Wiener process has
// mode coefficients that are standard complex Brownian motions.

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace spdeapprox {

struct CutoffScheme;

using cplx = std::complex<double>;

/// Truncated Fourier coefficients of an n-component real field, modes -N..N.
/// The reality constraint coeff(j, -k) = conj coeff(j, k) is kept by `set`.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(int components, int max_mode);

  int components() const { return n_; }
  int max_mode() const { return N_; }

  cplx operator()(int j, int k) const { return c_[index(j, k)]; }
  /// Sets mode k and its conjugate partner -k. At k = 0 only the real part is kept.
  void set(int j, int k, cplx v);
  /// Writes a single entry without touching the partner mode.
  void set_raw(int j, int k, cplx v) { c_[index(j, k)] = v; }

  /// Coefficients of component j, modes -N..N in ascending order.
  std::span<cplx> component(int j);
  std::span<const cplx> component(int j) const;

  /// max over j, k of |c(j,-k) - conj c(j,k)|
  double reality_defect() const;
  SpectralField truncated(int max_mode) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator*=(double s);

 private:
  std::size_t index(int j, int k) const {
    return static_cast<std::size_t>(j) * (2 * N_ + 1) + static_cast<std::size_t>(k + N_);
  }
  int n_ = 0;
  int N_ = 0;
  std::vector<cplx> c_;
};

/// Grid values of an n-component field at x_m = -pi + 2 pi m / M.
class GridField {
 public:
  GridField() = default;
  GridField(int components, int points);

  int components() const { return n_; }
  int points() const { return M_; }
  static double point(int m, int M);
  double spacing() const;

  double& operator()(int j, int m) { return v_[static_cast<std::size_t>(j) * M_ + m]; }
  double operator()(int j, int m) const { return v_[static_cast<std::size_t>(j) * M_ + m]; }
  std::span<double> component(int j);
  std::span<const double> component(int j) const;

  double sup_norm() const;

 private:
  int n_ = 0;
  int M_ = 0;
  std::vector<double> v_;
};

GridField to_physical(const SpectralField& field, int M);
SpectralField to_spectral(const GridField& grid, int N);

/// Modewise scaling by m(k); m must satisfy m(-k) = conj m(k) for a real result.
SpectralField apply_multiplier(const SpectralField& field, const std::function<cplx(int)>& m);

/// exp(t Delta_eps): mode k scaled by exp(-k^2 f(eps k) t).
SpectralField semigroup_apply(const SpectralField& field, const CutoffScheme& scheme, double eps,
                              double t);

/// (sum_j sum_k (1+k^2)^{-alpha} |c(j,k)|^2)^{1/2}
double sobolev_minus_alpha_norm(const SpectralField& field, double alpha);

/// Distance on the circle of length 2 pi.
double periodic_distance(double x, double y);

/// max |u(x)-u(y)| / d(x,y)^gamma over grid pairs whose indices are multiples
/// of `stride`; |.| is the Euclidean norm across components.
double holder_seminorm_estimate(const GridField& grid, double gamma, int stride = 1);

/// Garsia-Rodemich-Rumsey type double sum
/// (sum_{x != y} |u(x)-u(y)|^p / d(x,y)^{alpha p + 2} dx^2)^{1/p}.
double grr_norm_estimate(const GridField& grid, double alpha, double p);

struct NormConfig {
  double alpha = 0.45;
  double alpha_tilde = 0.4;
  double alpha_star = 0.48;
  double beta = 0.0;  // filled as alpha + kappa / 3 by `with_kappa`
  double beta_tilde = 0.0;
  int stride = 1;

  static NormConfig with_kappa(double alpha, double alpha_tilde, double alpha_star, double kappa);
  /// Throws ValidationError unless 1/3 < alpha_tilde <= alpha < alpha_star < 1/2.
  void validate() const;
};

// Serialization: component-major, mode-ascending (spectral) or point-ascending
// (grid). Binary files are little-endian: 4-byte magic, two uint32 extents,
// then IEEE-754 doubles (re, im pairs for spectral data).
void write_csv(std::ostream& os, const SpectralField& field);
void write_csv(std::ostream& os, const GridField& grid);
void write_binary(std::ostream& os, const SpectralField& field);
void write_binary(std::ostream& os, const GridField& grid);
SpectralField read_spectral_binary(std::istream& is);
GridField read_grid_binary(std::istream& is);

}  // namespace spdeapprox
