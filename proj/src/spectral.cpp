#include "spdeapprox/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

#include "fft.hpp"
#include "spdeapprox/errors.hpp"
#include "spdeapprox/schemes.hpp"

namespace spdeapprox {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310002;  // sqrt(2 pi)

double parity(int k) { return (k & 1) ? -1.0 : 1.0; }
}  // namespace

SpectralField::SpectralField(int components, int max_mode)
    : n_(components), N_(max_mode) {
  if (components < 1 || max_mode < 0)
    throw ValidationError("spectral field needs >= 1 component and max_mode >= 0");
  c_.assign(static_cast<std::size_t>(n_) * (2 * N_ + 1), cplx{0.0, 0.0});
}

void SpectralField::set(int j, int k, cplx v) {
  if (k == 0) {
    c_[index(j, 0)] = {v.real(), 0.0};
    return;
  }
  c_[index(j, k)] = v;
  c_[index(j, -k)] = std::conj(v);
}

std::span<cplx> SpectralField::component(int j) {
  return {c_.data() + static_cast<std::size_t>(j) * (2 * N_ + 1),
          static_cast<std::size_t>(2 * N_ + 1)};
}

std::span<const cplx> SpectralField::component(int j) const {
  return {c_.data() + static_cast<std::size_t>(j) * (2 * N_ + 1),
          static_cast<std::size_t>(2 * N_ + 1)};
}

double SpectralField::reality_defect() const {
  double worst = 0.0;
  for (int j = 0; j < n_; ++j)
    for (int k = 0; k <= N_; ++k)
      worst = std::max(worst, std::abs((*this)(j, -k) - std::conj((*this)(j, k))));
  return worst;
}

SpectralField SpectralField::truncated(int max_mode) const {
  SpectralField out(n_, max_mode);
  const int K = std::min(max_mode, N_);
  for (int j = 0; j < n_; ++j)
    for (int k = -K; k <= K; ++k) out.set_raw(j, k, (*this)(j, k));
  return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (o.n_ != n_ || o.N_ != N_) throw ValidationError("spectral field shape mismatch in +=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

GridField::GridField(int components, int points) : n_(components), M_(points) {
  if (components < 1 || points < 1)
    throw ValidationError("grid field needs >= 1 component and >= 1 point");
  v_.assign(static_cast<std::size_t>(n_) * M_, 0.0);
}

double GridField::point(int m, int M) {
  return -std::numbers::pi + 2.0 * std::numbers::pi * m / M;
}

double GridField::spacing() const { return 2.0 * std::numbers::pi / M_; }

std::span<double> GridField::component(int j) {
  return {v_.data() + static_cast<std::size_t>(j) * M_, static_cast<std::size_t>(M_)};
}

std::span<const double> GridField::component(int j) const {
  return {v_.data() + static_cast<std::size_t>(j) * M_, static_cast<std::size_t>(M_)};
}

double GridField::sup_norm() const {
  double s = 0.0;
  for (double v : v_) s = std::max(s, std::abs(v));
  return s;
}

GridField to_physical(const SpectralField& field, int M) {
  const int N = field.max_mode();
  if (M < 2 * N + 1)
    throw ValidationError("to_physical: grid size M = " + std::to_string(M) +
                          " < 2N+1 = " + std::to_string(2 * N + 1));
  GridField out(field.components(), M);
  std::vector<cplx> half(static_cast<std::size_t>(M / 2 + 1));
  for (int j = 0; j < field.components(); ++j) {
    std::fill(half.begin(), half.end(), cplx{0.0, 0.0});
    for (int k = 0; k <= N; ++k) half[k] = parity(k) * field(j, k) / kSqrt2Pi;
    half[0] = {half[0].real(), 0.0};
    fft::inverse_real(half, out.component(j));
  }
  return out;
}

SpectralField to_spectral(const GridField& grid, int N) {
  const int M = grid.points();
  if (M < 2 * N + 1)
    throw ValidationError("to_spectral: grid size M = " + std::to_string(M) +
                          " < 2N+1 = " + std::to_string(2 * N + 1));
  SpectralField out(grid.components(), N);
  std::vector<double> scratch(static_cast<std::size_t>(M));
  std::vector<cplx> half(static_cast<std::size_t>(M / 2 + 1));
  const double scale = kSqrt2Pi / M;
  for (int j = 0; j < grid.components(); ++j) {
    const auto src = grid.component(j);
    std::copy(src.begin(), src.end(), scratch.begin());
    fft::forward_real(scratch, half);
    for (int k = 0; k <= N; ++k) out.set(j, k, parity(k) * scale * half[k]);
  }
  return out;
}

SpectralField apply_multiplier(const SpectralField& field, const std::function<cplx(int)>& m) {
  SpectralField out(field.components(), field.max_mode());
  const int N = field.max_mode();
  std::vector<cplx> symbol(static_cast<std::size_t>(2 * N + 1));
  for (int k = -N; k <= N; ++k) symbol[k + N] = m(k);
  for (int j = 0; j < field.components(); ++j)
    for (int k = -N; k <= N; ++k) out.set_raw(j, k, symbol[k + N] * field(j, k));
  return out;
}

SpectralField semigroup_apply(const SpectralField& field, const CutoffScheme& scheme, double eps,
                              double t) {
  if (t < 0.0) throw ValidationError("semigroup_apply needs t >= 0");
  return apply_multiplier(field, [&](int k) {
    return cplx{std::exp(laplacian_multiplier(scheme, k, eps) * t), 0.0};
  });
}

double sobolev_minus_alpha_norm(const SpectralField& field, double alpha) {
  if (alpha < 0.0) throw ValidationError("sobolev_minus_alpha_norm needs alpha >= 0");
  double s = 0.0;
  const int N = field.max_mode();
  for (int j = 0; j < field.components(); ++j)
    for (int k = -N; k <= N; ++k)
      s += std::pow(1.0 + static_cast<double>(k) * k, -alpha) * std::norm(field(j, k));
  return std::sqrt(s);
}

double periodic_distance(double x, double y) {
  const double period = 2.0 * std::numbers::pi;
  double d = std::fmod(std::abs(x - y), period);
  return std::min(d, period - d);
}

namespace {

double pair_difference(const GridField& g, int a, int b) {
  double s = 0.0;
  for (int j = 0; j < g.components(); ++j) {
    const double d = g(j, a) - g(j, b);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

double holder_seminorm_estimate(const GridField& grid, double gamma, int stride) {
  if (!(gamma > 0.0 && gamma < 1.0 + 1e-15))
    throw ValidationError("holder_seminorm_estimate needs 0 < gamma <= 1");
  if (stride < 1) throw ValidationError("stride must be >= 1");
  const int M = grid.points();
  double best = 0.0;
  for (int a = 0; a < M; a += stride)
    for (int b = a + stride; b < M; b += stride) {
      const double d = periodic_distance(GridField::point(a, M), GridField::point(b, M));
      best = std::max(best, pair_difference(grid, a, b) / std::pow(d, gamma));
    }
  return best;
}

double grr_norm_estimate(const GridField& grid, double alpha, double p) {
  if (!(p >= 1.0)) throw ValidationError("grr_norm_estimate needs p >= 1");
  const int M = grid.points();
  const double dx = grid.spacing();
  const double expo = alpha * p + 2.0;
  double s = 0.0;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      if (a == b) continue;
      const double d = periodic_distance(GridField::point(a, M), GridField::point(b, M));
      s += std::pow(pair_difference(grid, a, b), p) / std::pow(d, expo);
    }
  return std::pow(s * dx * dx, 1.0 / p);
}

NormConfig NormConfig::with_kappa(double alpha, double alpha_tilde, double alpha_star,
                                  double kappa) {
  NormConfig c;
  c.alpha = alpha;
  c.alpha_tilde = alpha_tilde;
  c.alpha_star = alpha_star;
  c.beta = alpha + kappa / 3.0;
  c.beta_tilde = alpha_tilde + kappa / 3.0;
  return c;
}

void NormConfig::validate() const {
  if (!(1.0 / 3.0 < alpha_tilde && alpha_tilde <= alpha && alpha < alpha_star && alpha_star < 0.5))
    throw ValidationError("norm exponents must satisfy 1/3 < alpha_tilde <= alpha < alpha_star < 1/2");
  if (stride < 1) throw ValidationError("norm stride must be >= 1");
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw ValidationError("truncated binary field");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ValidationError("truncated binary field");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

void expect_magic(std::istream& is, const char* magic) {
  char m[4];
  if (!is.read(m, 4) || std::memcmp(m, magic, 4) != 0)
    throw ValidationError(std::string("bad magic, expected ") + std::string(magic, 4));
}

}  // namespace

void write_csv(std::ostream& os, const SpectralField& field) {
  os << "component,mode,re,im\n";
  os.precision(17);
  const int N = field.max_mode();
  for (int j = 0; j < field.components(); ++j)
    for (int k = -N; k <= N; ++k)
      os << j << ',' << k << ',' << field(j, k).real() << ',' << field(j, k).imag() << '\n';
}

void write_csv(std::ostream& os, const GridField& grid) {
  os << "component,index,x,value\n";
  os.precision(17);
  for (int j = 0; j < grid.components(); ++j)
    for (int m = 0; m < grid.points(); ++m)
      os << j << ',' << m << ',' << GridField::point(m, grid.points()) << ',' << grid(j, m) << '\n';
}

void write_binary(std::ostream& os, const SpectralField& field) {
  os.write("SPF1", 4);
  put_u32(os, static_cast<std::uint32_t>(field.components()));
  put_u32(os, static_cast<std::uint32_t>(field.max_mode()));
  const int N = field.max_mode();
  for (int j = 0; j < field.components(); ++j)
    for (int k = -N; k <= N; ++k) {
      put_f64(os, field(j, k).real());
      put_f64(os, field(j, k).imag());
    }
}

void write_binary(std::ostream& os, const GridField& grid) {
  os.write("GRD1", 4);
  put_u32(os, static_cast<std::uint32_t>(grid.components()));
  put_u32(os, static_cast<std::uint32_t>(grid.points()));
  for (int j = 0; j < grid.components(); ++j)
    for (int m = 0; m < grid.points(); ++m) put_f64(os, grid(j, m));
}

SpectralField read_spectral_binary(std::istream& is) {
  expect_magic(is, "SPF1");
  const int n = static_cast<int>(get_u32(is));
  const int N = static_cast<int>(get_u32(is));
  SpectralField f(n, N);
  for (int j = 0; j < n; ++j)
    for (int k = -N; k <= N; ++k) {
      const double re = get_f64(is);
      const double im = get_f64(is);
      f.set_raw(j, k, {re, im});
    }
  return f;
}

GridField read_grid_binary(std::istream& is) {
  expect_magic(is, "GRD1");
  const int n = static_cast<int>(get_u32(is));
  const int M = static_cast<int>(get_u32(is));
  GridField g(n, M);
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < M; ++m) g(j, m) = get_f64(is);
  return g;
}

}  // namespace spdeapprox
