#include "spdeapprox/correction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace spdeapprox {

namespace {

struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

class AdaptiveSimpson {
 public:
  AdaptiveSimpson(std::function<double(double)> fn, std::int64_t budget)
      : fn_(std::move(fn)), budget_(budget) {}

  double integrate(double a, double b, double tol) {
    const double fa = eval(a), fb = eval(b), fm = eval(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return recurse(a, b, fa, fm, fb, whole, tol, 48);
  }

  double error() const { return error_; }
  std::int64_t evaluations() const { return evals_; }
  bool exhausted() const { return evals_ > budget_; }

 private:
  double eval(double x) {
    ++evals_;
    return fn_(x);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double flm = eval(0.5 * (a + m)), frm = eval(0.5 * (m + b));
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol || exhausted()) {
      error_ += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }

  std::function<double(double)> fn_;
  std::int64_t budget_;
  std::int64_t evals_ = 0;
  double error_ = 0.0;
};

// int_T^inf cos(y t) t^{-n} dt (trig = cos) or sin(y t) t^{-n} dt, by repeated
// integration by parts; the remainder after `depth` steps is O(t^{-n-depth}).
double oscillatory_tail(bool cosine, int n, double y, double T, int depth) {
  if (depth == 0) return 0.0;
  const double Tn = std::pow(T, n);
  if (cosine)
    return -std::sin(y * T) / (y * Tn) + (n / y) * oscillatory_tail(false, n + 1, y, T, depth - 1);
  return std::cos(y * T) / (y * Tn) - (n / y) * oscillatory_tail(true, n + 1, y, T, depth - 1);
}

}  // namespace

LambdaResult lambda_integral(const AtomicSignedMeasure& mu, const Profile& f, const Profile& h,
                             double nu, const QuadratureOptions& opts) {
  if (!(nu > 0.0)) throw ValidationError("lambda needs nu > 0");
  if (!(opts.tolerance > 0.0)) throw ValidationError("lambda needs tol > 0");

  std::vector<Atom> atoms;
  double ymax = 0.0, ymin = std::numeric_limits<double>::infinity();
  for (const auto& a : mu.atoms()) {
    if (a.location == 0.0 || a.weight == 0.0) continue;  // 1 - cos(0) = 0
    atoms.push_back(a);
    ymax = std::max(ymax, std::abs(a.location));
    ymin = std::min(ymin, std::abs(a.location));
  }
  if (atoms.empty()) return {0.0, 0.0, 0};

  auto ratio = [&](double t) { return h(t) * h(t) / f(t); };
  auto integrand = [&](double t) {
    double s = 0.0;
    if (t < 1e-8) {
      for (const auto& a : atoms) s += a.weight * 0.5 * a.location * a.location;
    } else {
      for (const auto& a : atoms) {
        const double sn = std::sin(0.5 * a.location * t);
        s += a.weight * 2.0 * sn * sn / (t * t);
      }
    }
    return ratio(t) * s;
  };

  // Panels of width pi / ymax out to T; knots of f and h become panel edges.
  double T = 400.0 / ymin;
  std::vector<double> edges;
  for (const auto* p : {&f, &h})
    for (double k : p->knots())
      if (k > 0.0) {
        edges.push_back(k);
        T = std::max(T, k + std::numbers::pi / ymax);
      }
  const double width = std::numbers::pi / ymax;
  const auto panels = static_cast<std::int64_t>(std::ceil(T / width));
  T = panels * width;
  for (std::int64_t i = 0; i <= panels; ++i) edges.push_back(i * width);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const double scale = 1.0 / (2.0 * std::numbers::pi * nu);
  const double tol = 0.5 * opts.tolerance / scale;
  AdaptiveSimpson simpson(integrand, opts.max_evaluations);
  NeumaierSum total;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    total.add(simpson.integrate(a, b, tol * (b - a) / T));
    if (simpson.exhausted()) {
      LambdaResult partial{total.value() * scale, simpson.error() * scale, simpson.evaluations()};
      std::ostringstream os;
      os << "lambda quadrature exhausted its budget of " << opts.max_evaluations
         << " evaluations at t = " << b << " (partial value " << partial.value << ")";
      throw QuadratureError(os.str(), partial);
    }
  }

  // Tail t > T with h^2/f frozen at its value at T:
  //   int_T^inf (1 - cos(y t)) / t^2 dt = 1/T - int_T^inf cos(y t) / t^2 dt.
  const double cT = ratio(T);
  const double c2T = ratio(2.0 * T);
  double tail = 0.0, tail_err = 0.0;
  for (const auto& a : atoms) {
    const double y = std::abs(a.location);
    tail += a.weight * cT * (1.0 / T - oscillatory_tail(true, 2, y, T, 5));
    tail_err += std::abs(a.weight) * (std::abs(cT - c2T) * 2.0 / T + 720.0 / std::pow(y * T, 6) / y);
  }
  total.add(tail);

  return {total.value() * scale, (simpson.error() + tail_err) * scale, simpson.evaluations()};
}

LambdaResult lambda_exact(const CutoffScheme& scheme, double nu, const QuadratureOptions& opts) {
  const auto report = validate_scheme(scheme, ProbeGrid{});
  if (!report.passed()) {
    std::string failed;
    for (const auto& c : report.checks)
      if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
    throw ValidationError("scheme '" + scheme.name + "' fails validation: " + failed);
  }
  return lambda_integral(scheme.mu, scheme.f, scheme.h, nu, opts);
}

double mode_coefficient(const CutoffScheme& scheme, double eps, int k) {
  if (k == 0) return 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const double x = eps * k;
  return scheme.h(x) / (std::abs(static_cast<double>(k)) * std::sqrt(4.0 * std::numbers::pi * scheme.f(x)));
}

double mode_covariance(const CutoffScheme& scheme, double eps, int k, double s, double t) {
  if (k == 0) return std::min(s, t);
  const double rate = scheme.f(eps * k) * static_cast<double>(k) * k;
  return std::exp(-rate * std::abs(t - s)) - std::exp(-rate * (t + s));
}

double lambda_z_eps(const CutoffScheme& scheme, double z, double eps, double t, int N) {
  if (!(eps > 0.0)) throw ValidationError("lambda_z_eps needs eps > 0");
  if (N < 1) throw ValidationError("lambda_z_eps needs N >= 1");
  NeumaierSum s;
  for (int k = N; k >= 1; --k) {
    const double q = mode_coefficient(scheme, eps, k);
    const double sn = std::sin(0.5 * k * eps * z);
    s.add(q * q * mode_covariance(scheme, eps, k, t, t) * sn * sn);
  }
  // modes k and -k contribute equally
  return 4.0 / eps * s.value();
}

double lambda_eps(const CutoffScheme& scheme, double eps, double t, int N) {
  double s = 0.0;
  for (const auto& a : scheme.mu.atoms())
    if (a.location != 0.0) s += a.weight * lambda_z_eps(scheme, a.location, eps, t, N);
  return s;
}

double lambda_eps_tail_bound(const CutoffScheme& scheme, double eps, int N) {
  if (!(eps > 0.0) || N < 1) throw ValidationError("lambda_eps_tail_bound needs eps > 0, N >= 1");
  // sup of h^2/f beyond eps N, sampled
  double sup = 0.0;
  const double x0 = eps * N;
  for (int i = 0; i <= 4000; ++i) {
    const double x = x0 * (1.0 + i * 0.01);
    sup = std::max(sup, scheme.h(x) * scheme.h(x) / scheme.f(x));
  }
  return scheme.mu.total_variation() * sup / (std::numbers::pi * eps * N);
}

Vector correction_term(const TensorFn& dG, const MatrixFn& theta, double Lambda, const Vector& u) {
  const Tensor3 d = dG(u);
  const Matrix th = theta(u);
  const int n = static_cast<int>(u.size());
  if (d.dim() != n || th.rows() != n || th.cols() != n)
    throw ValidationError("corrected_drift: dimension mismatch between u, dG and theta");
  const Matrix tt = th * th.transpose();  // sum_k theta^j_k theta^l_k
  Vector out = Vector::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) out(i) -= Lambda * d(i, l, j) * tt(j, l);
  return out;
}

Vector corrected_drift(const VectorFn& F, const TensorFn& dG, const MatrixFn& theta, double Lambda,
                       const Vector& u) {
  Vector f = F(u);
  if (f.size() != u.size()) throw ValidationError("corrected_drift: F has wrong dimension");
  return f + correction_term(dG, theta, Lambda, u);
}

}  // namespace spdeapprox
