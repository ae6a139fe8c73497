#pragma once

#include <cstdint>

#include "spdeapprox/errors.hpp"
#include "spdeapprox/schemes.hpp"
#include "spdeapprox/tensor.hpp"

namespace spdeapprox {

struct LambdaResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::int64_t evaluations = 0;
};

/// Quadrature ran out of its evaluation budget before reaching the tolerance.
class QuadratureError : public NumericalAbort {
 public:
  QuadratureError(const std::string& what, LambdaResult partial)
      : NumericalAbort(what), partial_(partial) {}
  const LambdaResult& partial() const { return partial_; }

 private:
  LambdaResult partial_;
};

struct QuadratureOptions {
  double tolerance = 1e-10;
  std::int64_t max_evaluations = 20'000'000;
};

/// Correction constant
///   Lambda = 1/(2 pi nu) int_0^inf sum_a w_a (1 - cos(y_a t)) h(t)^2 / (t^2 f(t)) dt.
/// Validates the scheme first (throws ValidationError listing failed checks).
LambdaResult lambda_exact(const CutoffScheme& scheme, double nu = 1.0,
                          const QuadratureOptions& opts = {});

/// Same integral for an arbitrary atom list, without any scheme validation.
LambdaResult lambda_integral(const AtomicSignedMeasure& mu, const Profile& f, const Profile& h,
                             double nu = 1.0, const QuadratureOptions& opts = {});

/// q_eps^k: h(eps k) / (|k| sqrt(4 pi f(eps k))) for k != 0, 1/sqrt(2 pi) at k = 0.
double mode_coefficient(const CutoffScheme& scheme, double eps, int k);

/// K_k^{s,t}: exp(-f k^2 |t-s|) - exp(-f k^2 (t+s)) for k != 0, min(s, t) at k = 0.
double mode_covariance(const CutoffScheme& scheme, double eps, int k, double s, double t);

/// Lambda_{z,eps}(t) = E[(1/eps) XX^+(t; x, x + eps z)]
///                   = (2/eps) sum_{0<|k|<=N} (q^k)^2 K_k^{t,t} sin^2(k eps z / 2).
double lambda_z_eps(const CutoffScheme& scheme, double z, double eps, double t, int N);

/// sum_a w_a Lambda_{z_a,eps}(t)
double lambda_eps(const CutoffScheme& scheme, double eps, double t, int N);

/// Upper bound on the modes |k| > N omitted from lambda_eps.
double lambda_eps_tail_bound(const CutoffScheme& scheme, double eps, int N);

/// Fbar^i(u) = F^i(u) - Lambda theta^j_k(u) d_j G^i_l(u) theta^l_k(u)
/// with theta^j_k = theta(u)(j, k) and d_j G^i_l = dG(i, l, j).
Vector corrected_drift(const VectorFn& F, const TensorFn& dG, const MatrixFn& theta, double Lambda,
                       const Vector& u);

/// Only the correction part: -Lambda theta^j_k d_j G^i_l theta^l_k.
Vector correction_term(const TensorFn& dG, const MatrixFn& theta, double Lambda, const Vector& u);

}  // namespace spdeapprox
