#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace spdeapprox {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Derivative of a matrix-valued map G: R^n -> R^{n x n}, stored so that
/// `(i, j, k)` is d_k G^i_j.
class Tensor3 {
 public:
  explicit Tensor3(int n = 0) : n_(n), d_(static_cast<std::size_t>(n) * n * n, 0.0) {}
  int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return d_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }
  double operator()(int i, int j, int k) const {
    return d_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
  }

 private:
  int n_;
  std::vector<double> d_;
};

using VectorFn = std::function<Vector(const Vector&)>;
using MatrixFn = std::function<Matrix(const Vector&)>;
using TensorFn = std::function<Tensor3(const Vector&)>;

}  // namespace spdeapprox
