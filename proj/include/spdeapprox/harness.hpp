#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spdeapprox/config.hpp"

namespace spdeapprox {

/// Least-squares fit of log(value) = slope * log(eps) + intercept.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;  // 95% confidence half-width of the slope
  int points = 0;
  bool degenerate = false;  // all eps equal: slope undefined
  nlohmann::json to_json() const;
};

/// Needs >= 3 points and positive values (ValidationError otherwise).
RateFit rate_fit(const std::vector<std::pair<double, double>>& points);

struct SampleRow {
  double eps = 0.0;
  std::uint64_t sample = 0;
  std::map<std::string, double> metrics;
};

struct Aggregate {
  double eps = 0.0;
  std::string metric;
  double mean = 0.0;
  double std_error = 0.0;
  int count = 0;
};

struct RunRecord {
  std::string kind;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<SampleRow> rows;
  std::vector<Aggregate> aggregates;
  bool has_fit = false;
  RateFit fit;
  nlohmann::json extra = nlohmann::json::object();
  double wall_clock_seconds = 0.0;
  bool failed = false;
  std::string failure;

  /// Means and standard errors per (eps, metric), in order of first appearance.
  static std::vector<Aggregate> aggregate(const std::vector<SampleRow>& rows);
  const Aggregate* find(double eps, const std::string& metric) const;

  void write_rows_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
  /// Writes <dir>/per_sample.csv and <dir>/aggregate.json.
  void write(const std::string& dir) const;
};

/// Worker count: SPDEAPPROX_THREADS if set and positive, otherwise hardware concurrency.
int thread_count();
/// Calls job(i) for i in [0, count) on thread_count() workers.
void parallel_for(int count, const std::function<void(int)>& job);

/// sup over common recorded times (up to both end times) of the sup-norm distance,
/// and of the Holder seminorm of the difference. Returns {-1, -1} if nothing is comparable.
std::pair<double, double> trajectory_distance(const Trajectory& a, const Trajectory& b,
                                              double holder_exponent, int stride = 1);

RunRecord converge_experiment(const ExperimentConfig& cfg);
RunRecord correction_experiment(const ExperimentConfig& cfg);
RunRecord fluctuation_experiment(const ExperimentConfig& cfg);
RunRecord lambda_table(const ExperimentConfig& cfg);
RunRecord scheme_audit(const ExperimentConfig& cfg);
/// Per-sample lift diagnostics at each eps of the ladder (no fit).
RunRecord lift_experiment(const ExperimentConfig& cfg);

}  // namespace spdeapprox
