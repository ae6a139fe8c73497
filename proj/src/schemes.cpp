#include "spdeapprox/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spdeapprox/errors.hpp"

namespace spdeapprox {

Profile Profile::one() { return Profile(Kind::one, 0.0); }
Profile Profile::quadratic(double a) { return Profile(Kind::quadratic, a); }
Profile Profile::gaussian(double a) { return Profile(Kind::gaussian, a); }

Profile Profile::indicator(double radius) {
  if (!(radius > 0.0)) throw ValidationError("indicator profile needs radius > 0");
  return Profile(Kind::indicator, radius);
}

Profile Profile::tabulated(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw ValidationError("tabulated profile needs >= 2 (x, y) samples of equal length");
  if (xs.front() != 0.0) throw ValidationError("tabulated profile must start at x = 0");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw ValidationError("tabulated x samples must increase");
  Profile p(Kind::tabulated, 0.0);
  p.xs_ = std::move(xs);
  p.ys_ = std::move(ys);
  return p;
}

double Profile::operator()(double x) const {
  switch (kind_) {
    case Kind::one:
      return 1.0;
    case Kind::quadratic:
      return 1.0 + param_ * x * x;
    case Kind::gaussian:
      return std::exp(-param_ * x * x);
    case Kind::indicator:
      return std::abs(x) <= param_ ? 1.0 : 0.0;
    case Kind::tabulated: {
      const double a = std::abs(x);
      if (a >= xs_.back()) return ys_.back();
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), a);
      const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
      const double s = (a - xs_[i]) / (xs_[i + 1] - xs_[i]);
      return ys_[i] + s * (ys_[i + 1] - ys_[i]);
    }
  }
  return 0.0;
}

std::string Profile::name() const {
  switch (kind_) {
    case Kind::one: return "one";
    case Kind::quadratic: return "quadratic";
    case Kind::gaussian: return "gaussian";
    case Kind::indicator: return "indicator";
    case Kind::tabulated: return "tabulated";
  }
  return "unknown";
}

std::vector<double> Profile::knots() const {
  if (kind_ == Kind::indicator) return {param_};
  if (kind_ == Kind::tabulated) return xs_;
  return {};
}

nlohmann::json Profile::to_json() const {
  nlohmann::json j{{"kind", name()}};
  switch (kind_) {
    case Kind::quadratic:
    case Kind::gaussian:
      j["a"] = param_;
      break;
    case Kind::indicator:
      j["radius"] = param_;
      break;
    case Kind::tabulated:
      j["x"] = xs_;
      j["y"] = ys_;
      break;
    case Kind::one:
      break;
  }
  return j;
}

Profile Profile::from_json(const nlohmann::json& j) {
  if (j.is_string()) return from_json(nlohmann::json{{"kind", j.get<std::string>()}});
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "one") return one();
  if (kind == "quadratic") return quadratic(j.value("a", 1.0));
  if (kind == "gaussian") return gaussian(j.value("a", 1.0));
  if (kind == "indicator") return indicator(j.value("radius", 1.0));
  if (kind == "tabulated")
    return tabulated(j.at("x").get<std::vector<double>>(), j.at("y").get<std::vector<double>>());
  throw ValidationError("unknown profile kind '" + kind + "'");
}

AtomicSignedMeasure AtomicSignedMeasure::forward_difference() {
  return AtomicSignedMeasure({{1.0, 1.0}, {0.0, -1.0}});
}
AtomicSignedMeasure AtomicSignedMeasure::backward_difference() {
  return AtomicSignedMeasure({{0.0, 1.0}, {-1.0, -1.0}});
}
AtomicSignedMeasure AtomicSignedMeasure::central_difference() {
  return AtomicSignedMeasure({{1.0, 0.5}, {-1.0, -0.5}});
}

double AtomicSignedMeasure::mass() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight;
  return s;
}

double AtomicSignedMeasure::first_moment() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight * a.location;
  return s;
}

double AtomicSignedMeasure::total_variation() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += std::abs(a.weight);
  return s;
}

double AtomicSignedMeasure::second_moment() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += std::abs(a.weight) * a.location * a.location;
  return s;
}

double AtomicSignedMeasure::signed_abs_moment() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight * std::abs(a.location);
  return s;
}

double AtomicSignedMeasure::max_abs_location() const {
  double m = 0.0;
  for (const auto& a : atoms_) m = std::max(m, std::abs(a.location));
  return m;
}

AtomicSignedMeasure AtomicSignedMeasure::reflected() const {
  std::vector<Atom> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back({-a.location, -a.weight});
  return AtomicSignedMeasure(std::move(out));
}

AtomicSignedMeasure AtomicSignedMeasure::scaled(double c) const {
  std::vector<Atom> out = atoms_;
  for (auto& a : out) a.weight *= c;
  return AtomicSignedMeasure(std::move(out));
}

AtomicSignedMeasure AtomicSignedMeasure::merged(const AtomicSignedMeasure& other) const {
  std::vector<Atom> out = atoms_;
  out.insert(out.end(), other.atoms_.begin(), other.atoms_.end());
  return AtomicSignedMeasure(std::move(out));
}

CutoffScheme CutoffScheme::forward_difference() {
  return {"forward", Profile::one(), AtomicSignedMeasure::forward_difference(), Profile::one(),
          0.25, 1.0};
}

CutoffScheme CutoffScheme::backward_difference() {
  return {"backward", Profile::one(), AtomicSignedMeasure::backward_difference(), Profile::one(),
          0.25, 1.0};
}

CutoffScheme CutoffScheme::central_difference() {
  return {"central", Profile::one(), AtomicSignedMeasure::central_difference(), Profile::one(),
          0.25, 1.0};
}

CutoffScheme CutoffScheme::with_measure(std::string new_name, AtomicSignedMeasure m) const {
  CutoffScheme s = *this;
  s.name = std::move(new_name);
  s.mu = std::move(m);
  return s;
}

nlohmann::json CutoffScheme::to_json() const {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({a.location, a.weight});
  return {{"name", name}, {"f", f.to_json()}, {"h", h.to_json()}, {"mu", atoms},
          {"c_f", c_f},   {"delta", delta}};
}

CutoffScheme CutoffScheme::from_json(const nlohmann::json& j) {
  CutoffScheme s;
  if (j.contains("preset")) {
    const auto preset = j.at("preset").get<std::string>();
    if (preset == "forward") s = forward_difference();
    else if (preset == "backward") s = backward_difference();
    else if (preset == "central") s = central_difference();
    else throw ValidationError("unknown scheme preset '" + preset + "'");
  }
  s.name = j.value("name", s.name);
  if (j.contains("f")) s.f = Profile::from_json(j.at("f"));
  if (j.contains("h")) s.h = Profile::from_json(j.at("h"));
  if (j.contains("mu")) {
    std::vector<Atom> atoms;
    for (const auto& a : j.at("mu")) {
      if (a.is_array()) {
        if (a.size() != 2) throw ValidationError("mu atoms are [location, weight] pairs");
        atoms.push_back({a[0].get<double>(), a[1].get<double>()});
      } else {
        atoms.push_back({a.at("location").get<double>(), a.at("weight").get<double>()});
      }
    }
    s.mu = AtomicSignedMeasure(std::move(atoms));
  }
  s.c_f = j.value("c_f", s.c_f);
  s.delta = j.value("delta", s.delta);
  if (s.mu.atoms().empty()) throw ValidationError("scheme '" + s.name + "' has no atoms in mu");
  return s;
}

double laplacian_multiplier(const CutoffScheme& scheme, int k, double eps) {
  const double kk = static_cast<double>(k);
  if (eps == 0.0) return -kk * kk;
  return -kk * kk * scheme.f(eps * kk);
}

std::complex<double> derivative_multiplier(const CutoffScheme& scheme, int k, double eps) {
  if (k == 0) return {0.0, 0.0};
  std::complex<double> s{0.0, 0.0};
  for (const auto& a : scheme.mu.atoms())
    s += a.weight * std::polar(1.0, static_cast<double>(k) * eps * a.location);
  return s / eps;
}

double noise_multiplier(const CutoffScheme& scheme, int k, double eps) {
  return scheme.h(eps * static_cast<double>(k));
}

nlohmann::json ProbeGrid::to_json() const {
  return {{"k_max", k_max},
          {"k_step", k_step},
          {"t_min", t_min},
          {"t_max", t_max},
          {"t_count", t_count},
          {"bv_threshold", bv_threshold},
          {"moment_tolerance", moment_tolerance},
          {"derivative_step", derivative_step},
          {"derivative_tolerance", derivative_tolerance}};
}

ProbeGrid ProbeGrid::from_json(const nlohmann::json& j) {
  ProbeGrid p;
  p.k_max = j.value("k_max", p.k_max);
  p.k_step = j.value("k_step", p.k_step);
  p.t_min = j.value("t_min", p.t_min);
  p.t_max = j.value("t_max", p.t_max);
  p.t_count = j.value("t_count", p.t_count);
  p.bv_threshold = j.value("bv_threshold", p.bv_threshold);
  p.moment_tolerance = j.value("moment_tolerance", p.moment_tolerance);
  p.derivative_step = j.value("derivative_step", p.derivative_step);
  p.derivative_tolerance = j.value("derivative_tolerance", p.derivative_tolerance);
  if (!(p.k_max > 0 && p.k_step > 0 && p.t_min > 0 && p.t_max >= p.t_min && p.t_count >= 1))
    throw ValidationError("probe grid needs k_max, k_step, t_min > 0, t_max >= t_min, t_count >= 1");
  return p;
}

bool SchemeReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const SchemeCheck* SchemeReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::json SchemeReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json v = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json("non-finite");
    arr.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"value", v},
                   {"threshold", c.threshold},
                   {"detail", c.detail}});
  }
  return {{"passed", passed()}, {"checks", arr}};
}

double discrete_bv(const std::vector<double>& samples) {
  double s = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) s += std::abs(samples[i] - samples[i - 1]);
  return s;
}

namespace {

std::vector<double> symmetric_grid(double k_max, double step) {
  const int half = static_cast<int>(std::floor(k_max / step));
  std::vector<double> g;
  g.reserve(2 * static_cast<std::size_t>(half) + 1);
  for (int i = -half; i <= half; ++i) g.push_back(i * step);
  return g;
}

template <class Fn>
std::vector<double> sample(const std::vector<double>& grid, Fn&& fn) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double x : grid) out.push_back(fn(x));
  return out;
}

std::string at(double x) {
  std::ostringstream os;
  os << "at x = " << x;
  return os.str();
}

}  // namespace

SchemeReport validate_scheme(const CutoffScheme& scheme, const ProbeGrid& probe) {
  SchemeReport r;
  auto add = [&r](std::string name, bool ok, double value, double thr, std::string detail = {}) {
    r.checks.push_back({std::move(name), ok, value, thr, std::move(detail)});
  };
  const auto& mu = scheme.mu;
  const double tol = probe.moment_tolerance;

  add("mu.mass", std::abs(mu.mass()) <= tol, mu.mass(), tol, "total mass must vanish");
  add("mu.first_moment", std::abs(mu.first_moment() - 1.0) <= tol, mu.first_moment(), tol,
      "first moment must equal 1");
  add("mu.total_variation", std::isfinite(mu.total_variation()), mu.total_variation(),
      std::numeric_limits<double>::infinity());
  add("mu.second_moment", std::isfinite(mu.second_moment()), mu.second_moment(),
      std::numeric_limits<double>::infinity());

  const auto grid = symmetric_grid(probe.k_max, probe.k_step);
  const auto f = sample(grid, [&](double x) { return scheme.f(x); });
  const auto h = sample(grid, [&](double x) { return scheme.h(x); });

  add("c_f.range", scheme.c_f > 0.0 && scheme.c_f < 1.0, scheme.c_f, 1.0, "need 0 < c_f < 1");
  add("f.at_zero", std::abs(scheme.f(0.0) - 1.0) <= 1e-12, scheme.f(0.0), 1.0);

  {
    bool finite = true;
    double bad = 0.0;
    for (std::size_t i = 0; i < grid.size() && finite; ++i)
      if (!std::isfinite(f[i])) finite = false, bad = grid[i];
    add("f.finite", finite, finite ? 0.0 : bad, 0.0,
        finite ? "f finite on the probe grid (f = +inf modes are expressed through h instead)"
               : "f must be finite on the probe grid; " + at(bad));
  }

  {
    double worst = 0.0, where = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = std::abs(f[i] - f[grid.size() - 1 - i]);
      if (d > worst) worst = d, where = grid[i];
    }
    add("f.even", worst <= 1e-12, worst, 1e-12, worst > 1e-12 ? at(where) : "");
  }

  {
    double lo = std::numeric_limits<double>::infinity(), where = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid[i] > 0.0 && f[i] < lo) lo = f[i], where = grid[i];
    add("f.lower_bound", lo >= 2.0 * scheme.c_f, lo, 2.0 * scheme.c_f,
        "min of f over k > 0, " + at(where));
  }

  {
    // Jump between consecutive difference quotients on [-delta, delta]; a kink
    // shows up as an O(1) jump, a C^1 function as O(step).
    const double step = std::min(1e-3, scheme.delta / 100.0);
    const int n = static_cast<int>(std::floor(scheme.delta / step));
    double worst = 0.0, where = 0.0;
    double prev = (scheme.f(-n * step + step) - scheme.f(-n * step)) / step;
    for (int i = -n + 1; i < n; ++i) {
      const double q = (scheme.f((i + 1) * step) - scheme.f(i * step)) / step;
      if (std::abs(q - prev) > worst) worst = std::abs(q - prev), where = i * step;
      prev = q;
    }
    add("f.c1_near_zero", worst <= 1e-2, worst, 1e-2,
        "max jump of difference quotients on [-delta, delta], " + at(where));
  }

  {
    // sup over t of |b_t|_BV; the BV over the half-width grid is compared to
    // the full grid at the maximizing t to flag non-plateauing growth.
    double worst = 0.0, worst_t = probe.t_min;
    for (int it = 0; it < probe.t_count; ++it) {
      const double t = probe.t_count == 1
                           ? probe.t_min
                           : probe.t_min * std::pow(probe.t_max / probe.t_min,
                                                    static_cast<double>(it) / (probe.t_count - 1));
      std::vector<double> b(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i)
        b[i] = std::exp(-grid[i] * grid[i] * (f[i] - scheme.c_f) * t);
      const double bv = discrete_bv(b);
      if (bv > worst) worst = bv, worst_t = t;
    }
    const auto half = symmetric_grid(probe.k_max / 2.0, probe.k_step);
    std::vector<double> bh;
    bh.reserve(half.size());
    for (double k : half) bh.push_back(std::exp(-k * k * (scheme.f(k) - scheme.c_f) * worst_t));
    const double bv_half = discrete_bv(bh);
    const bool plateau = std::abs(worst - bv_half) <= 1e-3 * std::max(1.0, worst);
    std::ostringstream os;
    os << "sup over t-grid attained at t = " << worst_t << "; k-grid extent " << probe.k_max
       << (plateau ? "; plateaued" : "; NOT plateaued (BV still growing with extent)");
    add("b_t.bv", std::isfinite(worst) && worst <= probe.bv_threshold, worst, probe.bv_threshold,
        os.str());
    add("b_t.bv_plateau", plateau, std::abs(worst - bv_half), 1e-3 * std::max(1.0, worst),
        "BV difference between half and full k-grid extent");
  }

  add("h.at_zero", std::abs(scheme.h(0.0) - 1.0) <= 1e-12, scheme.h(0.0), 1.0);

  {
    double worst = 0.0, where = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = std::abs(h[i] - h[grid.size() - 1 - i]);
      if (d > worst) worst = d, where = grid[i];
    }
    add("h.even", worst <= 1e-12, worst, 1e-12, worst > 1e-12 ? at(where) : "");
  }

  {
    double sup = 0.0;
    for (double v : h) sup = std::max(sup, std::abs(v));
    add("h.bounded", std::isfinite(sup), sup, std::numeric_limits<double>::infinity(),
        "sup |h| on the probe grid");
  }

  {
    const double d = probe.derivative_step;
    const double deriv = (scheme.h(d) - scheme.h(-d)) / (2.0 * d);
    add("h.derivative_at_zero", std::abs(deriv) <= probe.derivative_tolerance, deriv,
        probe.derivative_tolerance, "symmetric difference estimate of h'(0)");
  }

  {
    std::vector<double> ratio(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) ratio[i] = h[i] * h[i] / f[i];
    const double bv = discrete_bv(ratio);
    add("h2_over_f.bv", std::isfinite(bv) && bv <= probe.bv_threshold, bv, probe.bv_threshold,
        "discrete BV of h^2/f on the probe grid");
  }

  return r;
}

}  // namespace spdeapprox
