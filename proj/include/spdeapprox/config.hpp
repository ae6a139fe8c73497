#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdeapprox/schemes.hpp"
#include "spdeapprox/solver.hpp"
#include "spdeapprox/spectral.hpp"

namespace spdeapprox {

/// Experiment description read from a JSON file (schema documented in README.md).
struct ExperimentConfig {
  static constexpr int kVersion = 1;

  int version = kVersion;
  std::string kind = "converge";  // converge | correction | fluctuation | lambda-table | scheme-audit
                                  // | simulate | lift
  std::vector<CutoffScheme> schemes{CutoffScheme::forward_difference()};
  std::vector<double> eps_ladder{0.25, 0.125, 0.0625, 0.03125};
  double eps_ref = 0.0078125;
  int samples = 10;
  std::uint64_t seed = 1;
  std::string out_dir = "results";

  struct Solver {
    std::string model = "multiplicative_bounded";
    int n = 1;
    int N = 64;
    int M = 192;
    double dt = 1e-4;
    double T = 0.1;
    double nu = 1.0;
    bool dealias = true;
    double dealias_fraction = 2.0 / 3.0;
    bool conservation_form = false;
    double blowup_cap = 1e6;
    std::vector<double> record_times;
  } solver;

  struct Lift {
    double t = 0.5;
    int n = 1;
    int N = 256;
    int M = 1024;
    double alpha = 0.45;
  } lift;

  struct LambdaTable {
    double t = 0.5;
    int N = 2048;
  } lambda;

  double kappa = 0.03;
  NormConfig norms = NormConfig::with_kappa(0.45, 0.4, 0.48, 0.03);

  /// Throws ValidationError on inconsistent settings (ladder order, sample count, ...).
  void validate() const;
  /// Solver configuration for one scheme at one eps (seed and sample left at zero).
  SolverConfig solver_config(const CutoffScheme& scheme, double eps) const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  std::string hash() const;
};

}  // namespace spdeapprox
