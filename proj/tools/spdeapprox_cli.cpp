#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "spdeapprox/config.hpp"
#include "spdeapprox/correction.hpp"
#include "spdeapprox/errors.hpp"
#include "spdeapprox/harness.hpp"
#include "spdeapprox/solver.hpp"

namespace {

using namespace spdeapprox;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "master seed (overrides the config)");
  cmd->add_option("--out", opts.out, "output directory (overrides the config)");
}

ExperimentConfig load(const CommonOptions& opts, const std::string& kind) {
  ExperimentConfig cfg = opts.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(opts.config);
  cfg.kind = kind;
  if (opts.seed) cfg.seed = *opts.seed;
  if (!opts.out.empty()) cfg.out_dir = opts.out;
  return cfg;
}

void print_aggregates(const RunRecord& rec) {
  std::printf("%-12s %-24s %14s %14s %6s\n", "eps", "metric", "mean", "std_error", "n");
  for (const auto& a : rec.aggregates)
    std::printf("%-12.6g %-24s %14.6e %14.6e %6d\n", a.eps, a.metric.c_str(), a.mean, a.std_error,
                a.count);
  if (rec.has_fit)
    std::printf("fitted slope %.4f +- %.4f (%d points)\n", rec.fit.slope, rec.fit.half_width,
                rec.fit.points);
  else if (rec.fit.degenerate)
    std::printf("fitted slope undefined (degenerate ladder)\n");
}

void print_lambda_rows(const RunRecord& rec) {
  const auto& schemes = rec.extra["schemes"];
  for (const auto& s : schemes)
    std::printf("scheme %-20s Lambda = %.12f (estimated error %.1e)\n",
                s["name"].get<std::string>().c_str(), s["lambda"].get<double>(),
                s["error_estimate"].get<double>());
  std::printf("%-20s %-12s %16s %14s %14s\n", "scheme", "eps", "lambda_eps", "gap", "tail_bound");
  for (const auto& r : rec.rows)
    std::printf("%-20s %-12.6g %16.9e %14.6e %14.6e\n",
                schemes[r.sample]["name"].get<std::string>().c_str(), r.eps, r.metrics.at("lambda_eps"),
                r.metrics.at("gap"), r.metrics.at("tail_bound"));
  if (rec.has_fit)
    std::printf("gap slope for %s: %.4f +- %.4f\n", schemes[0]["name"].get<std::string>().c_str(),
                rec.fit.slope, rec.fit.half_width);
}

int finish(const RunRecord& rec, const std::string& dir) {
  rec.write(dir);
  if (rec.kind == "lambda-table") {
    print_lambda_rows(rec);
    std::printf("wrote %s/per_sample.csv and %s/aggregate.json\n", dir.c_str(), dir.c_str());
    return 0;
  }
  print_aggregates(rec);
  if (!rec.extra.empty()) std::printf("%s\n", rec.extra.dump(2).c_str());
  std::printf("wrote %s/per_sample.csv and %s/aggregate.json (%.1f s)\n", dir.c_str(), dir.c_str(),
              rec.wall_clock_seconds);
  if (rec.failed) {
    std::fprintf(stderr, "experiment failed: %s\n", rec.failure.c_str());
    return 3;
  }
  return 0;
}

int run_check_scheme(const ExperimentConfig& cfg) {
  const RunRecord rec = scheme_audit(cfg);
  for (const auto& report : rec.extra["reports"]) {
    std::printf("scheme %s: %s\n", report.value("name", std::string("?")).c_str(),
                report.value("passed", false) ? "valid" : "INVALID");
    for (const auto& c : report["checks"])
      std::printf("  %-22s %-4s value=%-14s threshold=%-10.3g %s\n",
                  c.value("name", std::string()).c_str(), c.value("passed", false) ? "ok" : "FAIL",
                  c["value"].dump().c_str(), c.value("threshold", 0.0),
                  c.value("detail", std::string()).c_str());
  }
  rec.write(cfg.out_dir);
  return rec.extra["all_passed"].get<bool>() ? 0 : 2;
}

int run_simulate(const ExperimentConfig& cfg) {
  SolverConfig sc = cfg.solver_config(cfg.schemes.front(), cfg.eps_ladder.front());
  sc.seed = cfg.seed;
  const Trajectory traj = simulate(sc);
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    std::ofstream os(fs::path(cfg.out_dir) / ("snapshot_" + std::to_string(i) + ".csv"));
    write_csv(os, traj.snapshots[i]);
  }
  nlohmann::json meta{{"config_hash", traj.config_hash},
                      {"seed", traj.seed},
                      {"sample", traj.sample},
                      {"truncated", traj.truncated},
                      {"end_time", traj.end_time},
                      {"times", traj.times},
                      {"experiment", cfg.to_json()}};
  std::ofstream(fs::path(cfg.out_dir) / "metadata.json") << meta.dump(2) << '\n';
  std::printf("simulated to t = %g (%s), %zu snapshots in %s\n", traj.end_time,
              traj.truncated ? "truncated at blowup cap" : "complete", traj.snapshots.size(),
              cfg.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral approximations of stochastic PDEs and their correction terms"};
  app.require_subcommand(1);
  struct Command {
    const char* name;
    const char* help;
    CommonOptions opts;
    CLI::App* app = nullptr;
  };
  Command commands[] = {
      {"check-scheme", "validate cut-off schemes", {}},
      {"lambda", "correction constants and their finite-eps approximations", {}},
      {"lift", "per-sample diagnostics of the Gaussian lift", {}},
      {"fluctuation", "decay of the lift fluctuation around its mean", {}},
      {"simulate", "run one trajectory", {}},
      {"converge", "self-convergence ladder against the corrected reference", {}},
      {"correction", "detect the correction drift between two schemes", {}},
  };
  for (auto& c : commands) {
    c.app = app.add_subcommand(c.name, c.help);
    add_common(c.app, c.opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    for (auto& c : commands) {
      if (!c.app->parsed()) continue;
      const std::string name = c.name;
      if (name == "check-scheme") return run_check_scheme(load(c.opts, "scheme-audit"));
      if (name == "lambda") {
        const auto cfg = load(c.opts, "lambda-table");
        return finish(lambda_table(cfg), cfg.out_dir);
      }
      if (name == "lift") {
        const auto cfg = load(c.opts, "lift");
        return finish(lift_experiment(cfg), cfg.out_dir);
      }
      if (name == "fluctuation") {
        const auto cfg = load(c.opts, "fluctuation");
        return finish(fluctuation_experiment(cfg), cfg.out_dir);
      }
      if (name == "simulate") return run_simulate(load(c.opts, "simulate"));
      if (name == "converge") {
        const auto cfg = load(c.opts, "converge");
        return finish(converge_experiment(cfg), cfg.out_dir);
      }
      if (name == "correction") {
        const auto cfg = load(c.opts, "correction");
        return finish(correction_experiment(cfg), cfg.out_dir);
      }
    }
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  } catch (const NumericalAbort& e) {
    std::fprintf(stderr, "numerical abort at t = %g: %s\n", e.time(), e.what());
    return 3;
  }
  return 0;
}
