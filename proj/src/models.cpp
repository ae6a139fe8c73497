#include "spdeapprox/models.hpp"

#include <cmath>

#include "spdeapprox/errors.hpp"

namespace spdeapprox {

void ModelFunctions::validate() const {
  if (n < 1) throw ValidationError("model '" + name + "' needs n >= 1");
  if (!F || !G || !DG || !theta) throw ValidationError("model '" + name + "' is missing a coefficient");
  const Vector u = Vector::Zero(n);
  if (F(u).size() != n) throw ValidationError("model '" + name + "': F must return n values");
  const Matrix g = G(u);
  if (g.rows() != n || g.cols() != n) throw ValidationError("model '" + name + "': G must be n x n");
  if (DG(u).dim() != n) throw ValidationError("model '" + name + "': DG must be n x n x n");
  const Matrix th = theta(u);
  if (th.rows() != n || th.cols() != n) throw ValidationError("model '" + name + "': theta must be n x n");
  if (potential && potential(u).size() != n)
    throw ValidationError("model '" + name + "': potential must return n values");
}

double ModelFunctions::potential_mismatch(const std::vector<Vector>& probes, double step) const {
  if (!potential) return 0.0;
  double worst = 0.0;
  for (const auto& p : probes) {
    const Matrix g = G(p);
    for (int k = 0; k < n; ++k) {
      Vector a = p, b = p;
      a(k) += step;
      b(k) -= step;
      const Vector col = (potential(a) - potential(b)) / (2.0 * step);
      for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(col(i) - g(i, k)));
    }
  }
  return worst;
}

double ModelFunctions::derivative_mismatch(const std::vector<Vector>& probes, double step) const {
  double worst = 0.0;
  for (const auto& p : probes) {
    const Tensor3 d = DG(p);
    for (int k = 0; k < n; ++k) {
      Vector a = p, b = p;
      a(k) += step;
      b(k) -= step;
      const Matrix fd = (G(a) - G(b)) / (2.0 * step);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(fd(i, j) - d(i, j, k)));
    }
  }
  return worst;
}

namespace {

ModelFunctions base(const std::string& name, int n) {
  ModelFunctions m;
  m.n = n;
  m.name = name;
  m.F = [n](const Vector&) { return Vector::Zero(n).eval(); };
  m.G = [n](const Vector&) { return Matrix::Zero(n, n).eval(); };
  m.DG = [n](const Vector&) { return Tensor3(n); };
  m.theta = [n](const Vector&) { return Matrix::Identity(n, n).eval(); };
  return m;
}

void require_scalar(const std::string& name, int n) {
  if (n != 1) throw ValidationError("model '" + name + "' is scalar (n = 1)");
}

void make_burgers_type(ModelFunctions& m) {
  const int n = m.n;
  m.G = [](const Vector& u) { return Matrix(u.asDiagonal()); };
  m.DG = [n](const Vector&) {
    Tensor3 t(n);
    for (int i = 0; i < n; ++i) t(i, i, i) = 1.0;
    return t;
  };
  m.potential = [](const Vector& u) { return (0.5 * u.array().square()).matrix().eval(); };
}

}  // namespace

ModelFunctions make_model(const std::string& name, int n) {
  if (n < 1) throw ValidationError("model dimension must be >= 1");
  ModelFunctions m = base(name, n);
  if (name == "burgers") {
    require_scalar(name, n);
    make_burgers_type(m);
  } else if (name == "burgers_system") {
    make_burgers_type(m);
  } else if (name == "multiplicative_bounded") {
    require_scalar(name, n);
    make_burgers_type(m);
    m.theta = [](const Vector& u) {
      const double t = std::tanh(u(0));
      return Matrix::Constant(1, 1, std::sqrt(1.0 + t * t)).eval();
    };
  } else if (name == "linear_additive") {
  } else if (name == "zero") {
    m.theta = [n](const Vector&) { return Matrix::Zero(n, n).eval(); };
  } else if (name == "geometric_brownian") {
    require_scalar(name, n);
    m.theta = [](const Vector& u) { return Matrix::Constant(1, 1, u(0)).eval(); };
  } else {
    throw ValidationError("unknown model '" + name + "'");
  }
  return m;
}

std::vector<std::string> model_names() {
  return {"burgers", "burgers_system", "multiplicative_bounded", "linear_additive", "zero",
          "geometric_brownian"};
}

}  // namespace spdeapprox
