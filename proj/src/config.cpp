#include "spdeapprox/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "spdeapprox/errors.hpp"
#include "spdeapprox/models.hpp"

namespace spdeapprox {

namespace {

const std::vector<std::string> kKinds{"converge",     "correction", "fluctuation", "lambda-table",
                                      "scheme-audit", "simulate",   "lift"};

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (version != kVersion)
    throw ValidationError("unsupported config version " + std::to_string(version));
  if (std::find(kKinds.begin(), kKinds.end(), kind) == kKinds.end())
    throw ValidationError("unknown experiment kind '" + kind + "'");
  if (schemes.empty()) throw ValidationError("config needs at least one scheme");
  if (eps_ladder.empty()) throw ValidationError("config needs at least one eps");
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0)) throw ValidationError("eps values must be > 0");
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
      throw ValidationError("eps ladder must be strictly decreasing");
  }
  if (!(eps_ref > 0.0)) throw ValidationError("eps_ref must be > 0");
  if (samples < 1) throw ValidationError("sample count must be >= 1");
  if (kind == "correction" && schemes.size() < 2)
    throw ValidationError("correction experiment needs two schemes");
  if (!(lift.alpha > 0.0 && lift.alpha < 0.5)) throw ValidationError("lift alpha must lie in (0, 1/2)");
  if (lift.N < 1 || lift.M < 2 * lift.N + 1 || lift.n < 1)
    throw ValidationError("lift needs n >= 1, N >= 1 and M >= 2N + 1");
  if (!(lift.t > 0.0) || !(lambda.t > 0.0) || lambda.N < 1)
    throw ValidationError("lift and lambda tables need t > 0 and N >= 1");
  norms.validate();
  solver_config(schemes.front(), eps_ladder.front()).validate();
}

SolverConfig ExperimentConfig::solver_config(const CutoffScheme& scheme, double eps) const {
  SolverConfig c;
  c.scheme = scheme;
  c.eps = eps;
  c.N = solver.N;
  c.M = solver.M;
  c.dt = solver.dt;
  c.T = solver.T;
  c.nu = solver.nu;
  c.model = make_model(solver.model, solver.n);
  c.dealias = solver.dealias;
  c.dealias_fraction = solver.dealias_fraction;
  c.conservation_form = solver.conservation_form;
  c.blowup_cap = solver.blowup_cap;
  c.record_times = solver.record_times;
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json s = nlohmann::json::array();
  for (const auto& sc : schemes) s.push_back(sc.to_json());
  return {
      {"version", version},
      {"experiment", kind},
      {"schemes", s},
      {"eps", eps_ladder},
      {"eps_ref", eps_ref},
      {"samples", samples},
      {"seed", seed},
      {"out", out_dir},
      {"solver",
       {{"model", solver.model},
        {"n", solver.n},
        {"N", solver.N},
        {"M", solver.M},
        {"dt", solver.dt},
        {"T", solver.T},
        {"nu", solver.nu},
        {"dealias", solver.dealias},
        {"dealias_fraction", solver.dealias_fraction},
        {"conservation_form", solver.conservation_form},
        {"blowup_cap", solver.blowup_cap},
        {"record_times", solver.record_times}}},
      {"lift", {{"t", lift.t}, {"n", lift.n}, {"N", lift.N}, {"M", lift.M}, {"alpha", lift.alpha}}},
      {"lambda", {{"t", lambda.t}, {"N", lambda.N}}},
      {"norms",
       {{"alpha", norms.alpha},
        {"alpha_tilde", norms.alpha_tilde},
        {"alpha_star", norms.alpha_star},
        {"kappa", kappa},
        {"stride", norms.stride}}},
  };
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  ExperimentConfig c;
  read(j, "version", c.version);
  if (c.version != kVersion)
    throw ValidationError("unsupported config version " + std::to_string(c.version));
  read(j, "experiment", c.kind);
  if (j.contains("scheme")) c.schemes = {CutoffScheme::from_json(j.at("scheme"))};
  if (j.contains("schemes")) {
    c.schemes.clear();
    for (const auto& s : j.at("schemes")) c.schemes.push_back(CutoffScheme::from_json(s));
  }
  read(j, "eps", c.eps_ladder);
  read(j, "eps_ref", c.eps_ref);
  read(j, "samples", c.samples);
  read(j, "seed", c.seed);
  read(j, "out", c.out_dir);
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    read(s, "model", c.solver.model);
    read(s, "n", c.solver.n);
    read(s, "N", c.solver.N);
    read(s, "M", c.solver.M);
    read(s, "dt", c.solver.dt);
    read(s, "T", c.solver.T);
    read(s, "nu", c.solver.nu);
    read(s, "dealias", c.solver.dealias);
    read(s, "dealias_fraction", c.solver.dealias_fraction);
    read(s, "conservation_form", c.solver.conservation_form);
    read(s, "blowup_cap", c.solver.blowup_cap);
    read(s, "record_times", c.solver.record_times);
  }
  if (j.contains("lift")) {
    const auto& s = j.at("lift");
    read(s, "t", c.lift.t);
    read(s, "n", c.lift.n);
    read(s, "N", c.lift.N);
    read(s, "M", c.lift.M);
    read(s, "alpha", c.lift.alpha);
  }
  if (j.contains("lambda")) {
    read(j.at("lambda"), "t", c.lambda.t);
    read(j.at("lambda"), "N", c.lambda.N);
  }
  if (j.contains("norms")) {
    const auto& s = j.at("norms");
    double a = c.norms.alpha, at = c.norms.alpha_tilde, as = c.norms.alpha_star;
    int stride = c.norms.stride;
    read(s, "alpha", a);
    read(s, "alpha_tilde", at);
    read(s, "alpha_star", as);
    read(s, "kappa", c.kappa);
    read(s, "stride", stride);
    c.norms = NormConfig::with_kappa(a, at, as, c.kappa);
    c.norms.stride = stride;
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : to_json().dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace spdeapprox
