// Acceptance checks. Prints one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset. The exit status is non-zero if any criterion fails
// other than those listed in kKnownLimitations (documented in README.md).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "oracles.hpp"
#include "spdeapprox/config.hpp"
#include "spdeapprox/correction.hpp"
#include "spdeapprox/gaussian_lift.hpp"
#include "spdeapprox/harness.hpp"
#include "spdeapprox/noise.hpp"
#include "spdeapprox/rough_path.hpp"
#include "spdeapprox/solver.hpp"

using namespace spdeapprox;

namespace {

const double kPi = std::numbers::pi;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ModeState sampled_modes(const CutoffScheme& s, double eps, int n, int N, double t,
                        std::uint64_t seed, std::uint64_t sample) {
  const auto draws = NoiseStream(seed, sample).mode_draws(0, n, N);
  return evolve_modes(ModeState::zero(s, eps, n, N, seed), t, draws);
}

// 1. Chen relation on composed Gaussian lifts.
Outcome chen_relation() {
  const auto s = CutoffScheme::forward_difference();
  const int M = 256;
  const LiftSample lift = lift_XX(sampled_modes(s, 0.0625, 2, 100, 0.5, 101, 0), M, {});
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> pick(0, M);
  double worst = 0.0;
  for (int r = 0; r < 10000; ++r) {
    int a[3] = {pick(gen), pick(gen), pick(gen)};
    std::sort(a, a + 3);
    worst = std::max(worst, chen_defect(lift.path, a[0], a[1], a[2]));
  }
  return {worst <= 1e-12, "max defect over 1e4 triples " + fmt("%.3e", worst)};
}

// 2. Symmetric part of the scalar lift equals half the squared increment.
Outcome scalar_geometricity() {
  const auto s = CutoffScheme::forward_difference();
  const int N = 256, M = 1024;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double eps = 0.0625;
    const ModeState st = sampled_modes(s, eps, 1, N, 0.5, 202, i);
    const LiftSample lift = lift_XX(st, M, scheme_offsets(s, eps));
    const GridField X = assemble_X(st, M);
    double scale = 0.0, err = 0.0;
    for (int m = 0; m < M; ++m) {
      const double d = X(0, (m + 1) % M) - X(0, m);
      scale = std::max(scale, d * d);
      err = std::max(err, std::abs(lift.path.increment(m)(0, 0) - 0.5 * d * d));
    }
    worst = std::max(worst, err / scale);
  }
  return {worst <= 1e-8, "max |XX - (dX)^2/2| / max (dX)^2 over 20 samples " + fmt("%.3e", worst)};
}

// 3. Double series against direct quadrature of the iterated integral.
Outcome lift_oracle() {
  const auto s = CutoffScheme::forward_difference();
  double worst = 0.0;
  int r = 0;
  for (int N : {4, 8, 16})
    for (int rep = 0; rep < 3; ++rep, ++r) {
      const ModeState st = sampled_modes(s, 0.1, 2, N, 0.2 + 0.3 * rep, 303, r);
      const int M = 64;
      const std::vector<double> offsets{0.3, 1.1, -0.7};
      const LiftSample lift = lift_XX(st, M, offsets);
      for (double u : {0.3, 1.1, -0.7, 2.0 * kPi / M}) {
        const auto& g = lift.offset_values[lift.find_offset(u)];
        for (int m = 0; m < M; m += 9) {
          const Matrix q = oracle::iterated_integral(st, GridField::point(m, M), u, 96);
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) worst = std::max(worst, std::abs(g(a * 2 + b, m) - q(a, b)));
        }
      }
    }
  return {worst <= 1e-8, "max abs deviation over 9 states, 4 offsets " + fmt("%.3e", worst)};
}

// 4. Correction constants for the three difference schemes.
Outcome correction_constants() {
  // Brute-force confirmation of the closed form: for f = h = 1,
  // (1/2pi) int_0^inf (1 - cos(y t)) / t^2 dt = |y| / 4.
  auto brute = [](double y) {
    const double L = 4000.0;
    const int panels = 8'000'000;
    const double h = L / panels;
    auto g = [y](double t) { return t == 0.0 ? 0.5 * y * y : (1.0 - std::cos(y * t)) / (t * t); };
    double sum = g(0.0) + g(L);
    for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(i * h);
    return (sum * h / 3.0 + 1.0 / L) / (2.0 * kPi);  // tail of 1/t^2; the cosine tail is O(1/L^2)
  };
  const double quarter = brute(1.0);
  if (std::abs(quarter - 0.25) > 1e-6)
    return {false, "brute-force oracle disagrees with |y|/4: " + fmt("%.9f", quarter)};

  std::string detail = "oracle check " + fmt("%.9f", quarter) + ";";
  bool ok = true;
  for (const auto& sc : {CutoffScheme::forward_difference(), CutoffScheme::central_difference(),
                         CutoffScheme::backward_difference()}) {
    const double closed = 0.25 * sc.mu.signed_abs_moment();
    const double v = lambda_exact(sc, 1.0).value;
    ok = ok && std::abs(v - closed) <= 1e-6;
    if (closed == 0.0) ok = ok && std::abs(v) <= 1e-10;
    detail += " " + sc.name + "=" + fmt("%.12f", v);
  }
  return {ok, detail};
}

// 5. Decay of the finite-eps constant towards its limit.
Outcome lambda_decay() {
  const auto s = CutoffScheme::forward_difference();
  const double lam = lambda_exact(s).value;
  std::vector<std::pair<double, double>> pts;
  std::string detail;
  for (int j = 2; j <= 6; ++j) {
    const double eps = std::pow(2.0, -j);
    const double gap = std::abs(lambda_eps(s, eps, 0.5, 2048) - lam);
    pts.push_back({eps, gap});
    detail += fmt(" %.3e", gap);
  }
  const RateFit f = rate_fit(pts);
  return {f.slope >= 0.3, "slope " + fmt("%.3f", f.slope) + " (gaps" + detail + ")"};
}

// 6. Fluctuation statistic decay.
Outcome fluctuation_decay() {
  ExperimentConfig c;
  c.kind = "fluctuation";
  c.schemes = {CutoffScheme::forward_difference()};
  c.eps_ladder = {0.125, 0.0625, 0.03125, 0.015625};
  c.samples = 100;
  c.seed = 606;
  c.lift = {0.5, 1, 256, 1024, 0.45};
  const RunRecord rec = fluctuation_experiment(c);
  std::string detail;
  for (double e : c.eps_ladder) detail += fmt(" %.4f", rec.find(e, "statistic")->mean);
  const bool ok = rec.has_fit && rec.fit.slope >= 0.25 && rec.fit.slope <= 0.65;
  return {ok, "slope " + fmt("%.3f", rec.fit.slope) + " +- " + fmt("%.3f", rec.fit.half_width) +
                  " (means" + detail + ")"};
}

// 7. Mode covariance by Monte Carlo, reached in four exact transitions.
Outcome mode_covariance_mc() {
  const auto s = CutoffScheme::forward_difference();
  const int n = 2, N = 50, draws = 10000;
  bool ok = true;
  double worst_z = 0.0;
  for (double t : {0.1, 1.0}) {
    std::map<int, std::array<double, 6>> acc;  // sums of |x_0|^2, |x_1|^2, Re/Im x_0 x_1^*, and squares
    std::map<int, std::array<double, 6>> acc2;
    const std::vector<int> modes{0, 1, 5, 50};
    for (int k : modes) acc[k] = acc2[k] = {};
    for (int r = 0; r < draws; ++r) {
      const NoiseStream ns(707, r);
      ModeState st = ModeState::zero(s, 0.05, n, N);
      for (int step = 0; step < 4; ++step) st = evolve_modes(st, t / 4, ns.mode_draws(step, n, N));
      for (int k : modes) {
        const auto a = st.mode(0, k), b = st.mode(1, k);
        const auto ab = a * std::conj(b);
        const double v[4] = {std::norm(a), std::norm(b), ab.real(), ab.imag()};
        for (int i = 0; i < 4; ++i) {
          acc[k][i] += v[i];
          acc2[k][i] += v[i] * v[i];
        }
      }
    }
    for (int k : modes) {
      const double K = mode_covariance(s, 0.05, k, t, t);
      const double target[4] = {K, K, 0.0, 0.0};
      for (int i = 0; i < 4; ++i) {
        const double mean = acc[k][i] / draws;
        const double se = std::sqrt((acc2[k][i] / draws - mean * mean) / draws);
        if (k == 0 && i == 3) continue;  // real mode: imaginary part identically zero
        const double z = std::abs(mean - target[i]) / se;
        worst_z = std::max(worst_z, z);
        ok = ok && z < 5.0;
      }
    }
  }
  return {ok, "max |mean - K| / stderr over k in {0,1,5,50}, t in {0.1,1}: " + fmt("%.2f", worst_z)};
}

// 8. Rough versus Young sums.
Outcome rough_vs_young() {
  const int M = 4096;
  auto circle = std::make_shared<const RoughPathSample>(oracle::circle_lift(M));
  Matrix sv(M, 1), cv(M, 1);
  GridField ys(1, M), zs(1, M);
  std::vector<Matrix> sd(M, Matrix::Zero(1, 2)), cd(M, Matrix::Zero(1, 2));
  for (int m = 0; m < M; ++m) {
    sv(m, 0) = ys(0, m) = circle->values()(m, 1);
    cv(m, 0) = zs(0, m) = circle->values()(m, 0);
    sd[m](0, 1) = 1.0;
    cd[m](0, 0) = 1.0;
  }
  const double rough = rough_integral(ControlledPath{circle, sv, sd}, ControlledPath{circle, cv, cd}, 0, M)(0, 0);
  const double young = young_integral(ys, zs, 0, M)(0, 0);
  const double er = std::abs(rough + kPi), ey = std::abs(young + kPi);

  // Algebraic identity on Gaussian-lift data at several meshes.
  double worst_identity = 0.0, min_correction = 1e300;
  const auto s = CutoffScheme::forward_difference();
  for (int mesh : {256, 512, 1024}) {
    const LiftSample lift = lift_XX(sampled_modes(s, 0.0625, 2, 120, 0.5, 808, mesh), mesh, {});
    auto rp = std::make_shared<const RoughPathSample>(lift.path);
    const auto X = ControlledPath::identity(rp);
    GridField gx(2, mesh);
    for (int m = 0; m < mesh; ++m)
      for (int j = 0; j < 2; ++j) gx(j, m) = rp->values()(m, j);
    const Matrix corr = second_order_term(X, X, 0, mesh);
    const Matrix diff = rough_integral(X, X, 0, mesh) - young_integral(gx, gx, 0, mesh) - corr;
    worst_identity = std::max(worst_identity, diff.cwiseAbs().maxCoeff());
    min_correction = std::min(min_correction, corr.norm());
  }
  const bool ok = er <= 1e-6 && ey <= 1e-6 && worst_identity <= 1e-12 && min_correction > 1e-3;
  return {ok, "smooth data: |rough + pi| " + fmt("%.2e", er) + ", |young + pi| " + fmt("%.2e", ey) +
                  " (left-point sum error pi h^2/6 = " + fmt("%.2e", kPi * std::pow(2 * kPi / M, 2) / 6) +
                  "); identity defect " + fmt("%.2e", worst_identity) + ", |correction| >= " +
                  fmt("%.3f", min_correction)};
}

// 9. Exact linear integration.
Outcome exact_linear() {
  SolverConfig c;
  c.scheme = CutoffScheme::forward_difference();
  c.scheme.f = Profile::quadratic(0.3);
  c.eps = 0.1;
  c.N = 64;
  c.M = 192;
  c.dt = 1e-4;
  c.T = 0.1;  // 1000 steps
  c.model = make_model("zero");
  SpectralField u(1, c.N);
  for (int k = 0; k <= 20; ++k) u.set(0, k, {1.0 / (1 + k), 0.5 / (1 + k * k)});
  c.initial = u;
  const Trajectory tr = simulate(c);
  const SpectralField expect = semigroup_apply(u, c.scheme, c.eps, c.T);
  double worst = 0.0;
  for (int k = -c.N; k <= c.N; ++k) worst = std::max(worst, std::abs(tr.spectra.back()(0, k) - expect(0, k)));
  return {worst <= 1e-13 && c.steps() == 1000, "max coefficient deviation after 1000 steps " + fmt("%.2e", worst)};
}

// 10. Self-convergence ladder for the multiplicative model.
Outcome convergence_ladder() {
  ExperimentConfig c;
  c.kind = "converge";
  c.schemes = {CutoffScheme::forward_difference()};
  c.eps_ladder = {0.25, 0.125, 0.0625, 0.03125};
  c.eps_ref = 0.0078125;
  c.samples = 50;
  c.seed = 1010;
  c.solver.model = "multiplicative_bounded";
  c.solver.N = 256;
  c.solver.M = 768;
  c.solver.dt = 1e-4;
  c.solver.T = 0.25;
  const RunRecord rec = converge_experiment(c);
  std::string detail;
  for (double e : c.eps_ladder) detail += fmt(" %.4f", rec.find(e, "error")->mean);
  const bool mono = rec.extra["monotone_decreasing"].get<bool>();
  const bool ok = !rec.failed && mono && rec.has_fit && rec.fit.slope > 0.0;
  return {ok, "mean sup errors" + detail + "; slope " + fmt("%.3f", rec.fit.slope) +
                  (mono ? "; strictly decreasing" : "; NOT monotone")};
}

// 11. Correction drift detection.
Outcome correction_detection() {
  ExperimentConfig c;
  c.kind = "correction";
  c.schemes = {CutoffScheme::forward_difference(), CutoffScheme::central_difference()};
  c.eps_ladder = {0.03125};
  c.samples = 50;
  c.seed = 1111;
  c.solver.model = "burgers";
  c.solver.N = 256;
  c.solver.M = 768;
  c.solver.dt = 1e-4;
  c.solver.T = 0.5;
  const RunRecord rec = correction_experiment(c);
  const double ratio = rec.failed ? 0.0 : rec.extra["gap_ratio"].get<double>();
  return {!rec.failed && ratio >= 2.0,
          "gap ratio " + fmt("%.2f", ratio) + " (uncorrected " +
              fmt("%.4f", rec.find(0.03125, "gap_uncorrected")->mean) + ", corrected " +
              fmt("%.4f", rec.find(0.03125, "gap_corrected")->mean) + ")"};
}

// 12. Scaled discrete approximation against a quadrature oracle.
Outcome scaled_approximation() {
  const int M = 4096;
  auto circle = std::make_shared<const RoughPathSample>(oracle::circle_lift(M));
  // Y = X1 X2 with Y' = (X2, X1); Z = X2 + X1^2 / 2 with Z' = (X1, 1).
  Matrix yv(M, 1), zv(M, 1);
  std::vector<Matrix> yd(M, Matrix(1, 2)), zd(M, Matrix(1, 2));
  for (int m = 0; m < M; ++m) {
    const double c = circle->values()(m, 0), s = circle->values()(m, 1);
    yv(m, 0) = c * s;
    zv(m, 0) = s + 0.5 * c * c;
    yd[m] << s, c;
    zd[m] << c, 1.0;
  }
  const ControlledPath Y{circle, yv, yd}, Z{circle, zv, zd};
  const Profile kernel = Profile::gaussian(1.0);
  const double lambda = 1.0;
  // int_a^b f(lambda x) Y(x) Z'(x) dx by composite Gauss-Legendre
  auto integral = [&](double a, double b) {
    static const double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                    0.9061798459386640};
    static const double weights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                      0.4786286704993665, 0.2369268850561891};
    const int panels = 4000;
    const double h = (b - a) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p)
      for (int g = 0; g < 5; ++g) {
        const double x = a + (p + 0.5) * h + 0.5 * h * nodes[g];
        acc += 0.5 * h * weights[g] * kernel(lambda * x) * std::cos(x) * std::sin(x) *
               (std::cos(x) - std::cos(x) * std::sin(x));
      }
    return acc;
  };
  std::vector<std::pair<double, double>> fwd, bwd;
  std::string detail;
  for (int d : {32, 64, 128, 256}) {
    const double eps = 2.0 * kPi / d;
    const int Neps = d / 2;
    const double oracle_value = integral(-Neps * eps, Neps * eps);
    const double ip = scaled_integral_approx(kernel, lambda, eps, SumDirection::forward, Y, Z)(0, 0);
    const double im = scaled_integral_approx(kernel, lambda, eps, SumDirection::backward, Y, Z)(0, 0);
    fwd.push_back({eps, std::abs(ip - oracle_value)});
    bwd.push_back({eps, std::abs(-im - oracle_value)});
    detail += fmt(" %.2e", std::abs(ip - oracle_value));
  }
  const RateFit ff = rate_fit(fwd), fb = rate_fit(bwd);
  const double need = 3 * 0.45 - 1 - 0.1;
  bool decreasing = true;
  for (std::size_t i = 1; i < fwd.size(); ++i) decreasing = decreasing && fwd[i].second < fwd[i - 1].second;
  return {decreasing && ff.slope >= need,
          "forward errors" + detail + "; order " + fmt("%.2f", ff.slope) + " (backward " +
              fmt("%.2f", fb.slope) + "), required " + fmt("%.2f", need) + "; |f|_{1,1} = " +
              fmt("%.3f", kernel_norm_11(kernel))};
}

// Criteria that cannot be met as stated, with the reason printed next to the result.
const std::map<int, std::string> kKnownLimitations{
    {8, "the left-point Young sum of sin d(cos) on 4096 points is -pi sin(h)/h, "
        "off by pi h^2/6 = 1.23e-6 > 1e-6"},
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Chen relation on composed lifts", chen_relation},
      {"scalar lift geometricity", scalar_geometricity},
      {"double series matches iterated-integral quadrature", lift_oracle},
      {"correction constants of difference schemes", correction_constants},
      {"decay of the finite-eps correction constant", lambda_decay},
      {"decay of the lift fluctuation", fluctuation_decay},
      {"Monte-Carlo mode covariance", mode_covariance_mc},
      {"rough versus Young integrals", rough_vs_young},
      {"exact linear integration", exact_linear},
      {"self-convergence ladder", convergence_ladder},
      {"correction drift detection", correction_detection},
      {"scaled discrete approximation order", scaled_approximation},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string note;
    if (!o.passed) {
      if (auto it = kKnownLimitations.find(id); it != kKnownLimitations.end())
        note = " [known limitation: " + it->second + "]";
      else
        ++unexpected;
    }
    std::printf("%s criterion %2d: %s -- %s (%.1f s)%s\n", o.passed ? "PASS" : "FAIL", id,
                criteria[i].first, o.detail.c_str(), secs, note.c_str());
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
