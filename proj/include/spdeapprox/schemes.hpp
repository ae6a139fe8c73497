#pragma once

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

namespace spdeapprox {

/// Even real function used for the cut-off profiles f and h and for
/// integration kernels. Closed-form entries come from a small registry; the
/// tabulated entry interpolates linearly in |x| and is constant beyond the
/// last sample.
class Profile {
 public:
  enum class Kind { one, quadratic, gaussian, indicator, tabulated };

  static Profile one();
  /// 1 + a x^2
  static Profile quadratic(double a);
  /// exp(-a x^2)
  static Profile gaussian(double a);
  /// 1 on [-r, r], 0 outside (Galerkin-type cut-off)
  static Profile indicator(double radius);
  static Profile tabulated(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  std::string name() const;
  /// Points where the profile is not smooth (indicator edge, table knots).
  std::vector<double> knots() const;

  nlohmann::json to_json() const;
  static Profile from_json(const nlohmann::json& j);

 private:
  Profile(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_;
  double param_;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

struct Atom {
  double location;
  double weight;
};

/// Finite signed combination of Dirac masses; the measure behind D_eps.
class AtomicSignedMeasure {
 public:
  AtomicSignedMeasure() = default;
  explicit AtomicSignedMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

  static AtomicSignedMeasure forward_difference();   // delta_1 - delta_0
  static AtomicSignedMeasure backward_difference();  // delta_0 - delta_{-1}
  static AtomicSignedMeasure central_difference();   // (delta_1 - delta_{-1}) / 2

  const std::vector<Atom>& atoms() const { return atoms_; }

  double mass() const;
  double first_moment() const;
  double total_variation() const;
  /// sum |w| y^2
  double second_moment() const;
  /// sum w |y|; equals 4 nu Lambda when f = h = 1
  double signed_abs_moment() const;
  double max_abs_location() const;

  AtomicSignedMeasure reflected() const;
  AtomicSignedMeasure scaled(double c) const;
  AtomicSignedMeasure merged(const AtomicSignedMeasure& other) const;

 private:
  std::vector<Atom> atoms_;
};

struct CutoffScheme {
  std::string name;
  Profile f = Profile::one();
  AtomicSignedMeasure mu;
  Profile h = Profile::one();
  double c_f = 0.25;
  double delta = 1.0;

  static CutoffScheme forward_difference();
  static CutoffScheme backward_difference();
  static CutoffScheme central_difference();

  /// Same f, h, c_f and delta with another derivative measure.
  CutoffScheme with_measure(std::string new_name, AtomicSignedMeasure m) const;

  nlohmann::json to_json() const;
  static CutoffScheme from_json(const nlohmann::json& j);
};

/// -k^2 f(eps k); eps = 0 gives the exact Laplacian symbol.
double laplacian_multiplier(const CutoffScheme& scheme, int k, double eps);
/// (1/eps) sum_a w_a exp(i k eps y_a), which is i k g(eps k).
std::complex<double> derivative_multiplier(const CutoffScheme& scheme, int k, double eps);
/// h(eps k)
double noise_multiplier(const CutoffScheme& scheme, int k, double eps);

struct ProbeGrid {
  double k_max = 200.0;
  double k_step = 0.05;
  double t_min = 1e-4;
  double t_max = 10.0;
  int t_count = 41;
  double bv_threshold = 50.0;
  double moment_tolerance = 1e-12;
  double derivative_step = 1e-4;
  double derivative_tolerance = 1e-6;

  nlohmann::json to_json() const;
  static ProbeGrid from_json(const nlohmann::json& j);
};

struct SchemeCheck {
  std::string name;
  bool passed;
  double value;
  double threshold;
  std::string detail;
};

struct SchemeReport {
  std::vector<SchemeCheck> checks;

  bool passed() const;
  const SchemeCheck* find(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// Numerical audit of the standing assumptions on (f, mu, h). Never throws on
/// a violated assumption; every outcome lands in the report.
SchemeReport validate_scheme(const CutoffScheme& scheme, const ProbeGrid& probe);

/// Discrete total variation sum |m(x_{i+1}) - m(x_i)| of a sampled function.
double discrete_bv(const std::vector<double>& samples);

}  // namespace spdeapprox
