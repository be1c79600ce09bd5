// End-to-end checks, one PASS/FAIL line each. Exit status is the number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "flowstep/analysis.hpp"
#include "flowstep/design.hpp"
#include "flowstep/experiments.hpp"
#include "flowstep/integrators.hpp"
#include "flowstep/io.hpp"
#include "flowstep/optimizers.hpp"

using namespace flowstep;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double coefficient_gap(const MultistepMethod& a, const MultistepMethod& b) {
  if (a.steps() != b.steps()) return INFINITY;
  double gap = std::abs(a.h() - b.h());
  for (int i = 0; i <= a.steps(); ++i) {
    gap = std::max(gap, std::abs(a.rho()[i] - b.rho()[i]));
    gap = std::max(gap, std::abs(a.sigma()[i] - b.sigma()[i]));
  }
  return gap;
}

QuadraticProblem scalar_quadratic(double lambda) {
  Matrix A(1, 1);
  A(0, 0) = lambda;
  return QuadraticProblem(A, Vector::Zero(1), "scalar");
}

Check coefficient_identification() {
  Check c;
  const double polyak = coefficient_gap(identify_lmm(Algorithm::HeavyBall, 1.0, 9.0).method, method_m2(1.0, 9.0));
  const double nesterov =
      coefficient_gap(identify_lmm(Algorithm::NesterovStronglyConvex, 1.0, 9.0).method, method_m1(1.0, 9.0));
  c.expect(polyak <= 1e-12, "heavy ball vs M2 gap " + fmt(polyak));
  c.expect(nesterov <= 1e-12, "Nesterov vs M1 gap " + fmt(nesterov));
  return c;
}

Check iterate_equivalence() {
  Check c;
  double worst_momentum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    // dimensions 2..20, kappa from 1.5 to 1e4
    CompareConfig cfg;
    cfg.dimension = 2 + static_cast<int>((7 * seed) % 19);
    cfg.mu = 1.0;
    cfg.L = 1.5 * std::pow(1e4 / 1.5, static_cast<double>(seed) / 19.0);
    cfg.seed = 500 + seed;
    for (const char* pair : {"polyak:m2", "nesterov:m1"}) {
      cfg.pair = pair;
      const CompareResult r = compare(cfg);
      worst_momentum = std::max(worst_momentum, r.max_relative_deviation);
    }
  }
  c.expect(worst_momentum <= 1e-8, "momentum pairs deviate by " + fmt(worst_momentum));

  for (const char* pair : {"proxgrad:imex-euler", "mirror:negf-euler", "universal:gode-imex"}) {
    CompareConfig cfg;
    cfg.pair = pair;
    cfg.threshold = 1e-10;
    const CompareResult r = compare(cfg);
    c.expect(r.max_relative_deviation <= 1e-10, std::string(pair) + " deviates by " + fmt(r.max_relative_deviation));
  }
  return c;
}

Check rate_reproduction() {
  Check c;
  const double mu = 1.0, L = 9.0;
  const QuadraticProblem q = random_quadratic(10, mu, L, 2024);
  const SmoothProblem p = q.as_smooth();
  const Vector x0 = random_start(q, 2025);
  const GradientOracle grad = [&q](const Vector& x) { return q.gradient(x); };
  const int n = 300;

  auto lmm = [&](const MultistepMethod& m) {
    return run(m, grad, bootstrap_starts(m, p, x0, StartPolicy::MatchedAlgorithm), n - (m.steps() - 1));
  };
  struct Case {
    std::string name;
    Trajectory traj;
    double target;
    double tol;
  };
  const std::vector<Case> cases{
      {"optimal Euler", lmm(euler_optimal(mu, L).method), 0.8, 0.02},
      {"M1", lmm(method_m1(mu, L)), 2.0 / 3.0, 0.05},
      {"Nesterov", nesterov_sc(p, mu, L, x0, n), 2.0 / 3.0, 0.05},
      {"M2", lmm(method_m2(mu, L)), 0.5, 0.05},
      {"Polyak", heavy_ball(p, mu, L, x0, n), 0.5, 0.05},
  };
  std::vector<double> rates;
  for (const auto& k : cases) {
    const RateFit fit = fit_geometric_rate(k.traj, q.minimizer());
    c.expect(fit.r_squared >= 0.95, k.name + " r^2 " + fmt(fit.r_squared));
    c.expect(std::abs(fit.rate - k.target) <= k.tol, k.name + " rate " + fmt(fit.rate));
    rates.push_back(fit.rate);
  }
  c.expect(rates[3] < rates[1] && rates[1] < rates[0], "ordering M2 < M1 < Euler violated");
  return c;
}

Check design_identities() {
  Check c;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> log_mu(-3.0, 3.0), log_kappa(std::log(1.1), std::log(1e4));
  double worst_balance = 0.0, worst_modulus = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double mu = std::exp(log_mu(rng));
    const double L = mu * std::exp(log_kappa(rng));
    const double b = beta(mu, L);
    const OptimalRoots r = optimal_roots((1.0 + b) * (1.0 + b) / L, mu, L);
    worst_balance = std::max(worst_balance, std::abs(r.c_mu - r.c_L));

    const MultistepMethod m2 = method_m2(mu, L);
    for (int j = 0; j < 129; ++j) {
      const double lambda = mu + (L - mu) * j / 128.0;
      const double modulus = roots(characteristic_polynomial(m2, lambda * m2.h())).max_modulus();
      worst_modulus = std::max(worst_modulus, std::abs(modulus - b));
    }
  }
  c.expect(worst_balance <= 1e-12, "|c_mu - c_L| up to " + fmt(worst_balance));
  c.expect(worst_modulus <= 1e-9, "M2 root modulus off beta by " + fmt(worst_modulus));
  return c;
}

Check stability_theory() {
  Check c;
  for (const MultistepMethod& m : {euler_optimal(1.0, 9.0).method, method_m1(1.0, 9.0), method_m2(1.0, 9.0)}) {
    const StabilityReport r = analyze(m);
    c.expect(r.consistent && r.zero_stable, "a designed method fails consistency or the root condition");
  }
  const MultistepMethod double_root({1.0, -2.0, 1.0}, {0.0, 0.0}, 0.1);
  c.expect(!is_zero_stable(double_root), "rho = (z - 1)^2 passes zero-stability");

  const QuadraticProblem q = scalar_quadratic(1.0);
  const SmoothProblem p = q.as_smooth();
  const FlowOracle flow = [](double t) { return Vector::Constant(1, std::exp(-t)); };
  bool blows_up = !is_consistent(MultistepMethod({-0.9, 1.0}, {1.0}, 0.1)).consistent;
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const double T = truncation_error(MultistepMethod({-0.9, 1.0}, {1.0}, h), flow, p.gradient, 0).norm();
    blows_up = blows_up && std::abs(T * h - 0.1) <= 0.002;
  }
  c.expect(blows_up, "rho(1) != 0 example does not show the 0.1/h truncation error");

  const MultistepMethod euler = MultistepMethod::euler(1.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    double lh = u(rng);
    if (std::abs(std::abs(1.0 - lh) - 1.0) < 1e-6) lh += 1e-3;
    agree += in_stability_region(euler, lh) == (std::abs(1.0 - lh) <= 1.0);
  }
  c.expect(agree == 1000, "Euler region disagrees on " + std::to_string(1000 - agree) + " samples");
  return c;
}

Check continuous_bounds() {
  Check c;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QuadraticProblem q = random_quadratic(8, 0.5 + seed, 50.0, 900 + seed);
    const SmoothProblem p = q.as_smooth();
    const Vector x0 = random_start(q, seed);
    // f(x) - f* by subtraction bottoms out near eps |f*|; the quadratic form does not.
    const auto gap = [&q](const Vector& x) {
      const Vector e = x - q.minimizer();
      return 0.5 * e.dot(q.A() * e);
    };
    for (double t : {0.01, 0.1, 1.0, 5.0}) {
      const Vector x = exact_flow(q, x0, t);
      c.expect(gap(x) <= std::exp(-2.0 * q.mu() * t) * gap(x0) * (1 + 1e-9), "gap bound at t=" + fmt(t));
      c.expect(p.distance(x) <= std::exp(-q.mu() * t) * p.distance(x0) * (1 + 1e-9), "distance bound at t=" + fmt(t));
    }
  }
  const QuadraticProblem s = singular_quadratic(30, 4.0, 31);
  const SmoothProblem p = s.as_smooth();
  const Vector x0 = slow_mode_start(s);
  for (double t : {0.1, 1.0, 10.0}) {
    const double gap = p.gap(reference_flow(p, x0, t));
    c.expect(gap <= convex_rate_bound(p, x0, t) * (1 + 1e-6), "convex bound at t=" + fmt(t));
  }
  return c;
}

Check convex_exponents() {
  Check c;
  const QuadraticProblem q = singular_quadratic(400, 1.0, 7);
  const SmoothProblem p = q.as_smooth();
  const Vector x0 = slow_mode_start(q);
  const Trajectory gd = gradient_descent(p, 1.0 / q.L(), x0, 500);
  const Trajectory nest = nesterov_convex(p, q.L(), x0, 500);
  std::vector<double> gap_gd, gap_nest;
  for (std::size_t k = 0; k < gd.size(); ++k) {
    gap_gd.push_back(p.gap(gd[k]));
    gap_nest.push_back(p.gap(nest[k]));
  }
  const double s_gd = fit_decay_exponent(gap_gd, 50, 500).slope;
  const double s_nest = fit_decay_exponent(gap_nest, 50, 500).slope;
  c.expect(std::abs(s_gd + 1.0) <= 0.3, "gradient descent slope " + fmt(s_gd));
  c.expect(std::abs(s_nest + 2.0) <= 0.3, "Nesterov slope " + fmt(s_nest));
  return c;
}

Check figure_reproduction() {
  Check c;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "flowstep-acceptance-figure1";
  fs::remove_all(dir);
  std::ostringstream out, err;
  const int code = cli::run_cli({"figure1", "--out", dir.string(), "--reproducible"}, out, err);
  c.expect(code == cli::kSuccess, "figure1 exited with " + std::to_string(code) + ": " + err.str());
  if (code != cli::kSuccess) return c;
  for (const char* name : {"left.csv", "right.csv", "flow.csv"})
    c.expect(fs::exists(dir / name) && fs::file_size(dir / name) > 0, std::string(name) + " missing");

  const Json summary = Json::parse(out.str());
  for (const char* m : {"euler", "nesterov", "polyak"}) {
    const double ratio = summary.at("right").at(m).at("ratio").get<double>();
    c.expect(ratio >= 1.5 && ratio <= 2.5, std::string(m) + " deviation ratio " + fmt(ratio));
  }
  const auto iters = [&](const char* m) { return summary.at("left").at(m).at("iterations_to_accuracy").get<long>(); };
  c.expect(iters("polyak") > 0 && iters("nesterov") > 0 && iters("euler") > 0, "a method never reaches 1e-3");
  c.expect(iters("polyak") < iters("nesterov") && iters("nesterov") < iters("euler"),
           "iterations polyak " + std::to_string(iters("polyak")) + ", nesterov " + std::to_string(iters("nesterov")) +
               ", euler " + std::to_string(iters("euler")));
  return c;
}

Check dahlquist() {
  Check c;
  const QuadraticProblem q = random_quadratic(5, 1.0, 9.0, 3);
  const Vector x0 = smooth_start(q, 4);
  const std::vector<double> hs{0.05, 0.025, 0.0125, 0.00625};
  const std::vector<std::pair<std::string, MultistepMethod>> stable{
      {"Euler", MultistepMethod::euler(0.1)}, {"M1", method_m1(1.0, 9.0)}, {"M2", method_m2(1.0, 9.0)}};
  for (const auto& [name, m] : stable) {
    const auto rows = global_error_study(m, q, x0, 2.0, hs);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
      c.expect(rows[i + 1].max_error < rows[i].max_error, name + " error does not decrease at h=" + fmt(rows[i + 1].h));
  }
  // Consistent, with spurious root -5.
  const MultistepMethod unstable({-5.0, 4.0, 1.0}, {2.0, 4.0}, 0.1);
  const auto rows = global_error_study(unstable, scalar_quadratic(1.0), Vector::Ones(1), 1.0, {0.1, 0.05, 0.025, 0.0125});
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    c.expect(rows[i + 1].max_error > rows[i].max_error, "zero-unstable error does not grow at h=" + fmt(rows[i + 1].h));
  return c;
}

struct Criterion {
  int id;
  std::string name;
  std::function<Check()> body;
  double time_limit;  // seconds; 0 for none
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "coefficient identification", coefficient_identification, 1.0},
      {2, "iterate equivalence", iterate_equivalence, 10.0},
      {3, "rate reproduction", rate_reproduction, 0.0},
      {4, "optimal-design identities", design_identities, 0.0},
      {5, "stability theory", stability_theory, 0.0},
      {6, "continuous-time bounds", continuous_bounds, 0.0},
      {7, "convex exponents", convex_exponents, 0.0},
      {8, "figure reproduction", figure_reproduction, 5.0},
      {9, "Dahlquist property", dahlquist, 0.0},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = cr.body();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("threw: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.time_limit > 0.0) result.expect(seconds < cr.time_limit, "took " + fmt(seconds) + " s");
    failures += result.ok ? 0 : 1;
    std::printf("%s %d %s (%.2f s)%s%s\n", result.ok ? "PASS" : "FAIL", cr.id, cr.name.c_str(), seconds,
                result.detail.empty() ? "" : ": ", result.detail.c_str());
  }
  return failures;
}
