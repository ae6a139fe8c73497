#include "spdeapprox/rough_path.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spdeapprox/errors.hpp"

namespace spdeapprox {

namespace {

// Entrywise Neumaier summation for long sums of small matrices.
class MatrixAccumulator {
 public:
  MatrixAccumulator(Eigen::Index rows, Eigen::Index cols)
      : sum_(Matrix::Zero(rows, cols)), comp_(Matrix::Zero(rows, cols)) {}

  void add(const Matrix& x) {
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double s = sum_(r, c), v = x(r, c);
        const double t = s + v;
        comp_(r, c) += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
        sum_(r, c) = t;
      }
  }
  Matrix value() const { return sum_ + comp_; }

 private:
  Matrix sum_;
  Matrix comp_;
};

void check_span(const RoughPathSample& rp, int i, int j) {
  if (i < 0 || j > rp.points() || i > j)
    throw ValidationError("rough path span [" + std::to_string(i) + ", " + std::to_string(j) +
                          "] outside 0 <= i <= j <= " + std::to_string(rp.points()));
}

int wrap(int i, int M) { return i == M ? 0 : i; }

}  // namespace

RoughPathSample::RoughPathSample(Matrix values, std::vector<Matrix> increments)
    : values_(std::move(values)), increments_(std::move(increments)) {
  if (values_.rows() < 2) throw ValidationError("rough path needs at least 2 grid points");
  if (static_cast<Eigen::Index>(increments_.size()) != values_.rows())
    throw ValidationError("rough path needs one second-order increment per grid cell");
  for (const auto& m : increments_)
    if (m.rows() != values_.cols() || m.cols() != values_.cols())
      throw ValidationError("rough path increments must be n x n");
}

Vector RoughPathSample::value(int i) const {
  if (i < 0 || i > points()) throw ValidationError("rough path index out of range");
  return values_.row(wrap(i, points())).transpose();
}

Vector RoughPathSample::delta(int i, int j) const { return value(j) - value(i); }

RoughPathSample RoughPathSample::with_increment(int i, Matrix m) const {
  RoughPathSample out = *this;
  out.increments_.at(static_cast<std::size_t>(i)) = std::move(m);
  return out;
}

Matrix xx_eval(const RoughPathSample& rp, int i, int j) {
  check_span(rp, i, j);
  const int n = rp.dim();
  MatrixAccumulator acc(n, n);
  const Vector xi = rp.value(i);
  for (int m = i; m < j; ++m) {
    acc.add(rp.increment(m));
    if (m > i) acc.add((rp.value(m) - xi) * rp.delta(m, m + 1).transpose());
  }
  return acc.value();
}

Matrix xx_eval_balanced(const RoughPathSample& rp, int i, int j) {
  check_span(rp, i, j);
  if (j == i) return Matrix::Zero(rp.dim(), rp.dim());
  if (j == i + 1) return rp.increment(i);
  const int mid = i + (j - i) / 2;
  return xx_eval_balanced(rp, i, mid) + xx_eval_balanced(rp, mid, j) +
         rp.delta(i, mid) * rp.delta(mid, j).transpose();
}

Matrix xx_eval_reversed(const RoughPathSample& rp, int i, int j) {
  const Vector d = rp.delta(i, j);
  return -xx_eval(rp, i, j) + d * d.transpose();
}

double chen_defect(const RoughPathSample& rp, int i, int j, int k) {
  if (!(i <= j && j <= k)) throw ValidationError("chen_defect needs i <= j <= k");
  const Matrix d = xx_eval(rp, i, k) - xx_eval(rp, i, j) - xx_eval(rp, j, k) -
                   rp.delta(i, j) * rp.delta(j, k).transpose();
  return d.norm();
}

double geometricity_defect(const RoughPathSample& rp, int i, int j) {
  const Matrix xx = xx_eval(rp, i, j);
  const Vector d = rp.delta(i, j);
  return (0.5 * (xx + xx.transpose()) - 0.5 * d * d.transpose()).norm();
}

Vector ControlledPath::value(int i) const {
  const int M = static_cast<int>(values.rows());
  if (i < 0 || i > M) throw ValidationError("controlled path index out of range");
  return values.row(wrap(i, M)).transpose();
}

Vector ControlledPath::delta(int i, int j) const { return value(j) - value(i); }

Vector ControlledPath::remainder(int i, int j) const {
  const int M = static_cast<int>(values.rows());
  return delta(i, j) - derivative.at(static_cast<std::size_t>(wrap(i, M))) * reference->delta(i, j);
}

ControlledPath ControlledPath::smooth(std::shared_ptr<const RoughPathSample> ref, Matrix values) {
  const int n = ref->dim();
  const auto M = static_cast<std::size_t>(values.rows());
  std::vector<Matrix> d(M, Matrix::Zero(values.cols(), n));
  return {std::move(ref), std::move(values), std::move(d)};
}

ControlledPath ControlledPath::identity(std::shared_ptr<const RoughPathSample> ref) {
  const int n = ref->dim();
  Matrix values = ref->values();
  std::vector<Matrix> d(static_cast<std::size_t>(ref->points()), Matrix::Identity(n, n));
  return {std::move(ref), std::move(values), std::move(d)};
}

namespace {

void check_pair(const ControlledPath& Y, const ControlledPath& Z, int i, int j) {
  if (!Y.reference || Y.reference != Z.reference)
    throw ValidationError("controlled paths refer to different rough paths");
  const int M = Y.reference->points();
  if (Y.values.rows() != M || Z.values.rows() != M ||
      static_cast<int>(Y.derivative.size()) != M || static_cast<int>(Z.derivative.size()) != M)
    throw ValidationError("controlled path sampled on a different grid than its reference");
  check_span(*Y.reference, i, j);
}

}  // namespace

Matrix rough_integral(const ControlledPath& Y, const ControlledPath& Z, int i, int j) {
  check_pair(Y, Z, i, j);
  const auto& X = *Y.reference;
  MatrixAccumulator acc(Y.dim(), Z.dim());
  for (int m = i; m < j; ++m) {
    acc.add(Y.value(m) * Z.delta(m, m + 1).transpose());
    acc.add(Y.derivative[m] * X.increment(m) * Z.derivative[m].transpose());
  }
  return acc.value();
}

Matrix second_order_term(const ControlledPath& Y, const ControlledPath& Z, int i, int j) {
  check_pair(Y, Z, i, j);
  const auto& X = *Y.reference;
  MatrixAccumulator acc(Y.dim(), Z.dim());
  for (int m = i; m < j; ++m) acc.add(Y.derivative[m] * X.increment(m) * Z.derivative[m].transpose());
  return acc.value();
}

Vector rough_integral_contracted(const ControlledPath& Y, const ControlledPath& Z, int rows, int i,
                                 int j) {
  const int b = Z.dim();
  if (rows < 1 || Y.dim() != rows * b)
    throw ValidationError("contracted rough integral needs dim(Y) = rows * dim(Z)");
  const Matrix outer = rough_integral(Y, Z, i, j);
  Vector out = Vector::Zero(rows);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < b; ++c) out(r) += outer(r * b + c, c);
  return out;
}

Matrix young_integral(const GridField& Y, const GridField& Z, int i, int j) {
  const int M = Y.points();
  if (Z.points() != M) throw ValidationError("young_integral: grids differ");
  if (i < 0 || j > M || i > j) throw ValidationError("young_integral: bad index span");
  MatrixAccumulator acc(Y.components(), Z.components());
  Matrix term(Y.components(), Z.components());
  for (int m = i; m < j; ++m) {
    const int next = wrap(m + 1, M);
    for (int a = 0; a < Y.components(); ++a)
      for (int b = 0; b < Z.components(); ++b) term(a, b) = Y(a, m) * (Z(b, next) - Z(b, m));
    acc.add(term);
  }
  return acc.value();
}

Matrix scaled_integral_approx(const Profile& kernel, double lambda, double eps,
                              SumDirection direction, const ControlledPath& Y,
                              const ControlledPath& Z) {
  if (!(eps > 0.0 && lambda > 0.0)) throw ValidationError("scaled integral needs eps, lambda > 0");
  if (eps * lambda >= 1.0) throw ValidationError("scaled integral needs eps * lambda < 1");
  const auto& X = *Y.reference;
  const int M = X.points();
  check_pair(Y, Z, 0, M);
  if (M % 2 != 0) throw ValidationError("scaled integral needs an even grid size");
  const double h = 2.0 * std::numbers::pi / M;
  const double ratio = eps / h;
  const int s = static_cast<int>(std::lround(ratio));
  if (s < 1 || std::abs(ratio - s) > 1e-9 * ratio)
    throw ValidationError("scaled integral needs eps to be a whole multiple of the grid spacing");
  const int Neps = static_cast<int>(std::floor(static_cast<double>(M) / (2 * s) + 1e-12));

  MatrixAccumulator acc(Y.dim(), Z.dim());
  for (int k = -Neps; k < Neps; ++k) {
    const int a = M / 2 + s * k;
    const int b = a + s;
    if (direction == SumDirection::forward) {
      const double w = kernel(lambda * eps * k);
      acc.add(w * (Y.value(a) * Z.delta(a, b).transpose()));
      acc.add(w * (Y.derivative[wrap(a, M)] * xx_eval(X, a, b) * Z.derivative[wrap(a, M)].transpose()));
    } else {
      const double w = kernel(lambda * eps * (k + 1));
      const int bw = wrap(b, M);
      acc.add(w * (Y.value(b) * Z.delta(b, a).transpose()));
      acc.add(w * (Y.derivative[bw] * xx_eval_reversed(X, a, b) * Z.derivative[bw].transpose()));
    }
  }
  return acc.value();
}

double kernel_norm_11(const Profile& kernel, double window, int per_unit) {
  const int W = static_cast<int>(std::ceil(window));
  const double d = 1e-5;
  double total = 0.0;
  for (int k = -W; k < W; ++k) {
    double sup = 0.0;
    for (int i = 0; i <= per_unit; ++i) {
      const double x = k + static_cast<double>(i) / per_unit;
      const double deriv = (kernel(x + d) - kernel(x - d)) / (2.0 * d);
      sup = std::max(sup, std::abs(kernel(x)) + std::abs(deriv));
    }
    total += sup;
  }
  return total;
}

}  // namespace spdeapprox
