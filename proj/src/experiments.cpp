#include "flowstep/experiments.hpp"

#include <cmath>
#include <future>
#include <random>

#include "flowstep/analysis.hpp"
#include "flowstep/design.hpp"
#include "flowstep/integrators.hpp"
#include "flowstep/optimizers.hpp"

namespace flowstep {

Vector random_start(const QuadraticProblem& q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector x(q.dimension());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
  return q.minimizer() + x;
}

Vector smooth_start(const QuadraticProblem& q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double floor = 1e-12 * q.L();
  Vector c(q.dimension());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double u = normal(rng);
    const double lambda = q.eigenvalues()[i];
    c[i] = lambda > floor ? u / (lambda * lambda) : 0.0;
  }
  if (c.norm() == 0.0) throw Error(ErrorKind::InvalidArgument, "problem has no positive curvature");
  return q.minimizer() + q.eigenvectors() * (c / c.norm());
}

namespace {

long steps_to_reach(double t_max, double h) { return std::lround(std::ceil(t_max / h - 1e-9)); }

PanelRun integrate_flow(const std::string& name, const MultistepMethod& m, const SmoothProblem& p, const Vector& x0,
                        double t_max) {
  PanelRun run_;
  run_.method = name;
  run_.h = m.h();
  const auto starts = bootstrap_starts(m, p, x0, StartPolicy::ExactFlow);
  const long n = std::lround(t_max / m.h()) - (m.steps() - 1);
  run_.trajectory = run(m, p.gradient, starts, static_cast<int>(std::max(0L, n)));
  run_.trajectory.method = name;
  run_.trajectory.seed = p.seed;
  return run_;
}

}  // namespace

FlowTrackingResult flow_tracking(const FlowTrackingConfig& cfg) {
  if (!(cfg.mu > 0.0) || !(cfg.mu <= cfg.L)) throw Error(ErrorKind::InvalidInterval, "require 0 < mu <= L");
  if (cfg.dimension < 2) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 2");
  if (!(cfg.t_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_max must be positive");
  if (cfg.flow_samples < 2) throw Error(ErrorKind::InvalidArgument, "need at least two flow samples");

  const QuadraticProblem q = random_quadratic(cfg.dimension, cfg.mu, cfg.L, cfg.seed);
  FlowTrackingResult out{q.as_smooth(), smooth_start(q, cfg.seed + 1), Vector(), {}, {}, {}};
  const SmoothProblem& p = out.problem;
  const Vector& x0 = out.x0;
  const double mu = cfg.mu, L = cfg.L;
  out.x_at_t_max = exact_flow(q, x0, cfg.t_max);

  const double h_euler = 2.0 / (L + mu);
  const double h_nesterov = 1.0 / (L * (1.0 - beta(mu, L)));
  const double h_polyak = 1.0 / std::sqrt(mu * L);
  const auto own = [&](const std::string& name, double h, Trajectory traj) {
    traj.method = name;
    PanelRun r;
    r.method = name;
    r.h = h;
    r.iterations_to_accuracy = iterations_to_accuracy(traj, out.x_at_t_max, cfg.accuracy);
    r.trajectory = std::move(traj);
    out.own_step.push_back(std::move(r));
  };
  own("euler", h_euler, gradient_descent(p, h_euler, x0, static_cast<int>(steps_to_reach(cfg.t_max, h_euler))));
  own("nesterov", h_nesterov, nesterov_sc(p, mu, L, x0, static_cast<int>(steps_to_reach(cfg.t_max, h_nesterov))));
  own("polyak", h_polyak, heavy_ball(p, mu, L, x0, static_cast<int>(steps_to_reach(cfg.t_max, h_polyak))));

  const FlowOracle flow = [&](double t) { return exact_flow(q, x0, t); };
  const double h = 1.0 / L;
  const std::vector<std::pair<std::string, MultistepMethod>> methods{
      {"euler", MultistepMethod::euler(h)},
      {"nesterov", method_m1(mu, L).with_step(h)},
      {"polyak", method_m2(mu, L).with_step(h)}};
  for (const auto& [name, m] : methods) {
    PanelRun r = integrate_flow(name, m, p, x0, cfg.t_max);
    r.deviation = deviation_from_flow(r.trajectory, flow, cfg.t_max);
    const PanelRun half = integrate_flow(name, m.with_step(h / 2.0), p, x0, cfg.t_max);
    r.deviation_half_step = deviation_from_flow(half.trajectory, flow, cfg.t_max);
    out.common_step.push_back(std::move(r));
  }

  const double dt = cfg.t_max / static_cast<double>(cfg.flow_samples - 1);
  std::vector<Vector> samples;
  samples.reserve(static_cast<std::size_t>(cfg.flow_samples));
  for (int i = 0; i < cfg.flow_samples; ++i) samples.push_back(flow(dt * i));
  out.flow = constant_step_trajectory(std::move(samples), dt, "exact_flow");
  out.flow.seed = cfg.seed;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> compare_pairs() {
  return {"nesterov:m1", "polyak:m2", "heavy_ball:m2", "proxgrad:imex-euler", "mirror:negf-euler",
          "universal:gode-imex"};
}

namespace {

MirrorGeometry geometry_named(const std::string& name) {
  if (name == "entropy") return entropy_geometry();
  if (name == "euclidean") return euclidean_geometry();
  throw Error(ErrorKind::InvalidArgument, "unknown geometry '" + name + "' (entropy|euclidean)");
}

// Quadratic whose minimiser and start both lie well inside the positive orthant.
struct PositiveInstance {
  SmoothProblem problem;
  Vector x0;
};

PositiveInstance positive_instance(const CompareConfig& cfg) {
  const QuadraticProblem base = random_quadratic(cfg.dimension, cfg.mu, cfg.L, cfg.seed);
  std::mt19937_64 rng(cfg.seed + 1);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  Vector x_star(cfg.dimension), x0(cfg.dimension);
  for (int i = 0; i < cfg.dimension; ++i) x_star[i] = unit(rng);
  for (int i = 0; i < cfg.dimension; ++i) x0[i] = unit(rng);
  const QuadraticProblem q(base.A(), base.A() * x_star, "positive_quadratic", cfg.seed);
  return {q.as_smooth(), x0};
}

}  // namespace

CompareResult compare(const CompareConfig& cfg) {
  CompareResult r;
  r.pair = cfg.pair;
  r.threshold = cfg.threshold;
  const auto sep = cfg.pair.find(':');
  if (sep == std::string::npos) throw Error(ErrorKind::UnknownAlgorithm, "pair must look like optimizer:integrator");
  r.optimizer = cfg.pair.substr(0, sep);
  r.integrator = cfg.pair.substr(sep + 1);
  if (cfg.iterations < 1) throw Error(ErrorKind::InvalidArgument, "iterations must be positive");
  const int n = cfg.iterations;

  Trajectory a, b;
  if (cfg.pair == "nesterov:m1" || cfg.pair == "polyak:m2" || cfg.pair == "heavy_ball:m2") {
    const QuadraticProblem q = random_quadratic(cfg.dimension, cfg.mu, cfg.L, cfg.seed);
    const SmoothProblem p = q.as_smooth();
    const Vector x0 = random_start(q, cfg.seed + 1);
    const bool nesterov = cfg.pair == "nesterov:m1";
    const MultistepMethod m = nesterov ? method_m1(cfg.mu, cfg.L) : method_m2(cfg.mu, cfg.L);
    a = nesterov ? nesterov_sc(p, cfg.mu, cfg.L, x0, n) : heavy_ball(p, cfg.mu, cfg.L, x0, n);
    b = run(m, p.gradient, bootstrap_starts(m, p, x0, StartPolicy::MatchedAlgorithm), n - (m.steps() - 1));
  } else if (cfg.pair == "proxgrad:imex-euler") {
    const QuadraticProblem q = random_quadratic(cfg.dimension, cfg.mu, cfg.L, cfg.seed);
    const Vector x0 = random_start(q, cfg.seed + 1);
    const CompositeProblem c{q.as_smooth(), l1_regularizer(0.1)};
    const double h = 1.0 / cfg.L;
    a = proximal_gradient(c, h, x0, n);
    b = run_imex(ImexMethod::euler(h), c, {x0}, n);
  } else if (cfg.pair == "mirror:negf-euler") {
    const MirrorGeometry geom = geometry_named(cfg.geometry);
    const PositiveInstance inst = positive_instance(cfg);
    const double h = 1.0 / cfg.L;
    a = mirror_descent(inst.problem, geom, h, inst.x0, n);
    b = run_negf_euler(inst.problem, geom, h, inst.x0, n);
  } else if (cfg.pair == "universal:gode-imex") {
    const MirrorGeometry geom = geometry_named(cfg.geometry);
    const PositiveInstance inst = positive_instance(cfg);
    const Regularizer omega = geom.euclidean ? l1_regularizer(0.1) : squared_norm_regularizer(0.5);
    const CompositeProblem c{inst.problem, omega};
    const double h = 1.0 / cfg.L;
    a = universal_gradient(c, geom, h, inst.x0, n);
    b = run_gode_imex(c, geom, h, inst.x0, n);
  } else {
    throw Error(ErrorKind::UnknownAlgorithm, "unsupported pair '" + cfg.pair + "'");
  }
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "optimizer and integrator lengths differ");
  r.max_relative_deviation = max_relative_deviation(a, b);
  r.pass = r.max_relative_deviation <= cfg.threshold;
  return r;
}

// ---------------------------------------------------------------------------

MultistepMethod builtin_method(const std::string& name, double mu, double L) {
  if (name == "euler") return euler_optimal(mu, L).method;
  if (name == "m1") return method_m1(mu, L);
  if (name == "m2") return method_m2(mu, L);
  if (name == "polyak" || name == "heavy_ball") return identify_lmm(Algorithm::HeavyBall, mu, L).method;
  if (name == "nesterov") return identify_lmm(Algorithm::NesterovStronglyConvex, mu, L).method;
  throw Error(ErrorKind::UnknownAlgorithm, "unknown builtin method '" + name + "'");
}

namespace {

int iterations_for(double rate) {
  if (!(rate > 0.0)) return 100;
  if (rate >= 1.0) return 400;
  const double needed = std::log(1e-15) / std::log(rate);
  return static_cast<int>(std::clamp(1.3 * needed + 40.0, 100.0, 20000.0));
}

SweepCell make_cell(const std::string& method, const std::string& parameter, double value, double mu, double L) {
  SweepCell c;
  c.method = method;
  c.parameter = parameter;
  c.value = value;
  c.mu = mu;
  c.L = L;
  return c;
}

SweepCell evaluate_cell(SweepCell cell, const MultistepMethod& m, int dimension, std::uint64_t seed) {
  try {
    cell.h = m.h();
    cell.predicted_rate = rate_prediction(m, cell.mu, cell.L).r_max;
    const QuadraticProblem q = random_quadratic(dimension, cell.mu, cell.L, seed);
    const SmoothProblem p = q.as_smooth();
    const Vector x0 = random_start(q, seed + 1);
    const int n = iterations_for(cell.predicted_rate);
    const Trajectory traj = run(m, p.gradient, bootstrap_starts(m, p, x0, StartPolicy::MatchedAlgorithm), n);
    const RateFit fit = fit_geometric_rate(traj, q.minimizer());
    cell.fitted_rate = fit.rate;
    cell.r_squared = fit.r_squared;
    cell.status = "ok";
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::NonFiniteIterate: cell.status = "diverged"; break;
      case ErrorKind::InsufficientData: cell.status = "insufficient_data"; break;
      default: cell.status = std::string("error: ") + e.what();
    }
  }
  return cell;
}

}  // namespace

std::vector<SweepCell> sweep(const SweepConfig& cfg) {
  if (!cfg.kappa_grid.empty() && !cfg.h_grid.empty())
    throw Error(ErrorKind::InvalidArgument, "give either a kappa grid or an h grid, not both");
  if (cfg.methods.empty()) throw Error(ErrorKind::InvalidArgument, "no methods to sweep");
  if (!(cfg.mu > 0.0)) throw Error(ErrorKind::InvalidInterval, "mu must be positive");
  for (double k : cfg.kappa_grid)
    if (!(k >= 1.0)) throw Error(ErrorKind::InvalidInterval, "kappa must be >= 1");
  for (double h : cfg.h_grid)
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid steps must be positive");

  struct Job {
    SweepCell cell;
    MultistepMethod method;
  };
  std::vector<Job> jobs;
  for (const auto& name : cfg.methods) {
    if (!cfg.kappa_grid.empty()) {
      for (double kappa : cfg.kappa_grid) {
        const SweepCell c = make_cell(name, "kappa", kappa, cfg.mu, kappa * cfg.mu);
        jobs.push_back({c, builtin_method(name, c.mu, c.L)});
      }
    } else if (!cfg.h_grid.empty()) {
      if (!(cfg.mu <= cfg.L)) throw Error(ErrorKind::InvalidInterval, "require mu <= L");
      const MultistepMethod base = builtin_method(name, cfg.mu, cfg.L);
      for (double h : cfg.h_grid) jobs.push_back({make_cell(name, "h", h, cfg.mu, cfg.L), base.with_step(h)});
    } else {
      if (!(cfg.mu <= cfg.L)) throw Error(ErrorKind::InvalidInterval, "require mu <= L");
      jobs.push_back({make_cell(name, "none", 0.0, cfg.mu, cfg.L), builtin_method(name, cfg.mu, cfg.L)});
    }
  }

  std::vector<SweepCell> cells;
  cells.reserve(jobs.size());
  if (!cfg.parallel) {
    for (const auto& j : jobs) cells.push_back(evaluate_cell(j.cell, j.method, cfg.dimension, cfg.seed));
    return cells;
  }
  std::vector<std::future<SweepCell>> pending;
  for (const auto& j : jobs)
    pending.push_back(std::async(std::launch::async, evaluate_cell, j.cell, j.method, cfg.dimension, cfg.seed));
  for (auto& f : pending) cells.push_back(f.get());
  return cells;
}

}  // namespace flowstep
