#pragma once

#include <string>
#include <vector>

#include "spdeapprox/tensor.hpp"

namespace spdeapprox {

/// Coefficients of du = (nu Delta u + F(u) + G(u) D u) dt + theta(u) dW.
struct ModelFunctions {
  int n = 1;
  std::string name;
  VectorFn F;
  MatrixFn G;
  TensorFn DG;  // (i, j, k) = d_k G^i_j
  MatrixFn theta;
  /// Optional potential with Jacobian G, enabling the conservation form D(potential(u)).
  VectorFn potential;

  bool has_potential() const { return static_cast<bool>(potential); }

  /// Throws ValidationError on missing callbacks or wrong output shapes at u = 0.
  void validate() const;

  /// Largest gap between a central-difference Jacobian of the potential and G over
  /// the probe points (0 when there is no potential).
  double potential_mismatch(const std::vector<Vector>& probes, double step = 1e-5) const;
  /// Largest gap between a central-difference derivative of G and DG.
  double derivative_mismatch(const std::vector<Vector>& probes, double step = 1e-5) const;
};

/// Built-in models:
///   burgers                 F = 0, G(u) = u, theta = 1, potential u^2/2           (n = 1)
///   multiplicative_bounded  F = 0, G(u) = u, theta = sqrt(1 + tanh^2 u), potential (n = 1)
///   linear_additive         F = 0, G = 0, theta = Id                              (any n)
///   zero                    F = 0, G = 0, theta = 0                               (any n)
///   geometric_brownian      F = 0, G = 0, theta(u) = u                            (n = 1)
///   burgers_system          F = 0, G(u) = diag(u), theta = Id, potential u_i^2/2   (any n)
ModelFunctions make_model(const std::string& name, int n = 1);
std::vector<std::string> model_names();

}  // namespace spdeapprox
