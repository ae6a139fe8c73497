#pragma once

#include <memory>
#include <vector>

#include "spdeapprox/schemes.hpp"
#include "spdeapprox/spectral.hpp"
#include "spdeapprox/tensor.hpp"

namespace spdeapprox {

/// A rough path sampled on the periodic grid x_m = -pi + 2 pi m / M.
///
/// Only the second-order increments over adjacent cells XX(x_m, x_{m+1}) are
/// stored (the last one wraps from x_{M-1} to x_M = x_0 + 2 pi). Longer spans
/// are composed on demand with
///   XX(x, z) = XX(x, y) + XX(y, z) + dX(x, y) (x) dX(y, z),
/// so the Chen relation holds by construction. Grid indices run over 0..M,
/// index M standing for x_0 + 2 pi.
class RoughPathSample {
 public:
  RoughPathSample() = default;
  /// values: M x n, one row per grid point; increments: M matrices n x n.
  RoughPathSample(Matrix values, std::vector<Matrix> increments);

  int points() const { return static_cast<int>(values_.rows()); }
  int dim() const { return static_cast<int>(values_.cols()); }

  Vector value(int i) const;
  Vector delta(int i, int j) const;
  const Matrix& increment(int i) const { return increments_.at(static_cast<std::size_t>(i)); }
  const Matrix& values() const { return values_; }

  /// Copy with increment i replaced.
  RoughPathSample with_increment(int i, Matrix m) const;

 private:
  Matrix values_;
  std::vector<Matrix> increments_;
};

/// XX(x_i, x_j) for 0 <= i <= j <= M, by left-to-right composition.
Matrix xx_eval(const RoughPathSample& rp, int i, int j);
/// Same span composed by recursive halving (different rounding path).
Matrix xx_eval_balanced(const RoughPathSample& rp, int i, int j);
/// XX(x_j, x_i) for i <= j, from Chen with XX(x, x) = 0:
///   XX(y, x) = -XX(x, y) + dX(x, y) (x) dX(x, y).
Matrix xx_eval_reversed(const RoughPathSample& rp, int i, int j);

/// |XX(i,k) - XX(i,j) - XX(j,k) - dX(i,j) (x) dX(j,k)|_F for i <= j <= k.
double chen_defect(const RoughPathSample& rp, int i, int j, int k);
/// |sym XX(i,j) - dX(i,j) (x) dX(i,j) / 2|_F for i <= j.
double geometricity_defect(const RoughPathSample& rp, int i, int j);

/// A path Y (M x d) with Gubinelli derivative Y' (M matrices d x n) relative
/// to a reference rough path; R_Y(x,y) = dY(x,y) - Y'(x) dX(x,y) is derived.
struct ControlledPath {
  std::shared_ptr<const RoughPathSample> reference;
  Matrix values;
  std::vector<Matrix> derivative;

  int dim() const { return static_cast<int>(values.cols()); }
  Vector value(int i) const;
  Vector delta(int i, int j) const;
  Vector remainder(int i, int j) const;
  /// Y' = 0: a path with no rough component (smooth data).
  static ControlledPath smooth(std::shared_ptr<const RoughPathSample> ref, Matrix values);
  /// The reference path itself, Y = X, Y' = Id.
  static ControlledPath identity(std::shared_ptr<const RoughPathSample> ref);
};

/// Second-order Riemann sum over [x_i, x_j] on the native grid:
///   sum_m Y(x_m) (x) dZ(x_m, x_{m+1}) + Y'(x_m) XX(x_m, x_{m+1}) Z'(x_m)^T.
/// Result is dim(Y) x dim(Z).
Matrix rough_integral(const ControlledPath& Y, const ControlledPath& Z, int i, int j);

/// Only the sum of the second-order terms Y' XX Z'^T.
Matrix second_order_term(const ControlledPath& Y, const ControlledPath& Z, int i, int j);

/// Contracted form for integrands acting on Z: Y holds an a x b matrix per
/// point, flattened row-major (dim(Y) = a b, b = dim(Z)), and
///   out_i = sum_j [rough_integral]_{(i b + j), j},
/// i.e. sum Y^i_j dZ^j + Y'^i_{j,l} XX^{l m} Z'^j_m.
Vector rough_integral_contracted(const ControlledPath& Y, const ControlledPath& Z, int rows, int i,
                                 int j);

/// First-order left-point sum sum_m Y(x_m) (x) dZ(x_m, x_{m+1}) over grid
/// indices i..j (j may equal M, wrapping to the first point).
Matrix young_integral(const GridField& Y, const GridField& Z, int i, int j);

enum class SumDirection { forward, backward };

/// Kernel-weighted discrete rough integrals on the step grid x_k = eps k,
/// k = -N_eps .. N_eps - 1 with N_eps = floor(pi / eps):
///   forward:  sum f(lambda x_k) [Y(x_k) dZ(x_k, x_{k+1}) + Y'(x_k) XX(x_k, x_{k+1}) Z'(x_k)^T]
///   backward: sum f(lambda x_{k+1}) [Y(x_{k+1}) dZ(x_{k+1}, x_k)
///                                   + Y'(x_{k+1}) XX(x_{k+1}, x_k) Z'(x_{k+1})^T]
/// The forward sum approximates int f(lambda x) Y dZ, the backward sum its
/// negative. eps must be a whole multiple of the grid spacing and the grid
/// size even (so that x = 0 is a grid point). Throws if eps * lambda >= 1.
Matrix scaled_integral_approx(const Profile& kernel, double lambda, double eps,
                              SumDirection direction, const ControlledPath& Y,
                              const ControlledPath& Z);

/// |f|_{1,1} = sum_k sup_{[k,k+1]} (|f| + |f'|), estimated on [-window, window]
/// with `per_unit` samples per unit interval and central differences for f'.
double kernel_norm_11(const Profile& kernel, double window = 64.0, int per_unit = 200);

}  // namespace spdeapprox
