#include "flowstep/multistep.hpp"

#include <cmath>
#include <sstream>

namespace flowstep {

MultistepMethod::MultistepMethod(PolynomialD rho, PolynomialD sigma, double h)
    : rho_(std::move(rho)), sigma_(std::move(sigma)), h_(h) {
  if (rho_.is_zero() || rho_.degree() < 1)
    throw Error(ErrorKind::InvalidArgument, "rho must have degree at least 1");
  if (!rho_.is_monic(1e-12)) throw Error(ErrorKind::InvalidArgument, "rho must be monic");
  if (sigma_.degree() > rho_.degree())
    throw Error(ErrorKind::InvalidArgument, "deg(sigma) must not exceed deg(rho)");
  if (!(h_ > 0.0) || !std::isfinite(h_)) throw Error(ErrorKind::InvalidArgument, "step size must be positive");
}

MultistepMethod MultistepMethod::euler(double h) { return MultistepMethod({-1.0, 1.0}, {1.0}, h); }

ConsistencyReport is_consistent(const MultistepMethod& m, double tol) {
  ConsistencyReport r;
  r.rho_at_one = std::abs(m.rho()(1.0));
  r.derivative_gap = std::abs(m.rho().derivative()(1.0) - m.sigma()(1.0));
  r.consistent = r.rho_at_one <= tol && r.derivative_gap <= tol;
  return r;
}

bool is_zero_stable(const MultistepMethod& m, double tol) { return root_condition(m.rho(), tol).satisfied; }

StabilityReport analyze(const MultistepMethod& m, double consistency_tol, double root_tol) {
  StabilityReport report;
  const ConsistencyReport c = is_consistent(m, consistency_tol);
  report.consistent = c.consistent;
  report.rho_at_one = c.rho_at_one;
  report.derivative_gap = c.derivative_gap;
  auto rc = root_condition(m.rho(), root_tol);
  report.zero_stable = rc.satisfied;
  report.rho_roots = std::move(rc.roots);
  report.offending_roots = std::move(rc.offending);
  return report;
}

PolynomialD characteristic_polynomial(const MultistepMethod& m, double lambda_h) {
  return m.rho() + lambda_h * m.sigma();
}

bool in_stability_region(const MultistepMethod& m, double lambda_h, double tol) {
  return root_condition(characteristic_polynomial(m, lambda_h), tol).satisfied;
}

namespace {

void check_interval(double mu, double L) {
  if (!(mu > 0.0) || !(mu <= L) || !std::isfinite(L)) {
    std::ostringstream os;
    os << "require 0 < mu <= L, got mu=" << mu << " L=" << L;
    throw Error(ErrorKind::InvalidInterval, os.str());
  }
}

double grid_point(double mu, double L, int i, int n) {
  if (i == n - 1) return L;
  return mu + (L - mu) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

bool absolutely_stable_on(const MultistepMethod& m, double mu, double L, int grid_size, double tol) {
  check_interval(mu, L);
  if (grid_size < 2) throw Error(ErrorKind::InvalidArgument, "grid_size must be at least 2");
  for (int i = 0; i < grid_size; ++i)
    if (!in_stability_region(m, grid_point(mu, L, i, grid_size) * m.h(), tol)) return false;
  return true;
}

RatePrediction rate_prediction(const MultistepMethod& m, double mu, double L, int grid_size) {
  check_interval(mu, L);
  if (grid_size < 2) throw Error(ErrorKind::InvalidArgument, "grid_size must be at least 2");
  RatePrediction best;
  best.r_max = -1.0;
  for (int i = 0; i < grid_size; ++i) {
    const double lambda = grid_point(mu, L, i, grid_size);
    const RootSet<double> rs = roots(characteristic_polynomial(m, lambda * m.h()));
    for (const auto& r : rs.roots) {
      const double modulus = std::abs(r.value);
      // Ties (up to rounding) keep the earliest lambda and the largest multiplicity.
      const bool tie = std::abs(modulus - best.r_max) <= 1e-12 * std::max(1.0, modulus);
      if ((!tie && modulus > best.r_max) || (tie && r.multiplicity > best.multiplicity)) {
        best.r_max = modulus;
        best.multiplicity = r.multiplicity;
        best.argmax_lambda = lambda;
      }
    }
  }
  if (best.r_max < 0.0) best.r_max = 0.0;
  return best;
}

Vector truncation_error(const MultistepMethod& m, const FlowOracle& flow, const GradientOracle& gradient, int k) {
  if (!m.is_explicit()) throw Error(ErrorKind::InvalidArgument, "truncation_error supports explicit methods only");
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "k must be non-negative");
  const int s = m.steps();
  const double h = m.h();
  Vector next;
  for (int i = 0; i < s; ++i) {
    const Vector x = flow(h * (k + i));
    const Vector term = -m.rho()[i] * x - h * m.sigma()[i] * gradient(x);
    if (i == 0)
      next = term;
    else
      next += term;
  }
  return (flow(h * (k + s)) - next) / h;
}

Trajectory run(const MultistepMethod& m, const GradientOracle& gradient, const std::vector<Vector>& starts, int n) {
  const int s = m.steps();
  if (static_cast<int>(starts.size()) != s)
    throw Error(ErrorKind::InvalidArgument, "run needs exactly s starting points");
  if (!m.is_explicit()) throw Error(ErrorKind::InvalidArgument, "implicit methods are driven by the integrators");
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "n must be non-negative");

  const double h = m.h();
  std::vector<Vector> x(starts.begin(), starts.end());
  std::vector<Vector> g;
  g.reserve(static_cast<std::size_t>(n + s));
  for (const auto& p : x) g.push_back(-gradient(p));

  x.reserve(static_cast<std::size_t>(n + s));
  for (int k = 0; k < n; ++k) {
    Vector next = Vector::Zero(x[0].size());
    for (int i = 0; i < s; ++i) {
      const double rho_i = m.rho()[i];
      const double sigma_i = m.sigma()[i];
      if (rho_i != 0.0) next -= rho_i * x[k + i];
      if (sigma_i != 0.0) next += (h * sigma_i) * g[k + i];
    }
    const double norm = next.norm();
    if (!std::isfinite(norm) || norm > kDivergenceThreshold) {
      std::ostringstream os;
      os << "iterate " << (k + s) << " has norm " << norm;
      throw Error(ErrorKind::NonFiniteIterate, os.str());
    }
    g.push_back(-gradient(next));
    x.push_back(std::move(next));
  }
  return constant_step_trajectory(std::move(x), h, "lmm");
}

double max_recurrence_residual(const MultistepMethod& m, const GradientOracle& gradient, const Trajectory& traj) {
  const int s = m.steps();
  double worst = 0.0;
  for (std::size_t k = 0; k + static_cast<std::size_t>(s) < traj.size(); ++k) {
    Vector lhs = Vector::Zero(traj[0].size());
    Vector rhs = Vector::Zero(traj[0].size());
    for (int i = 0; i <= s; ++i) {
      lhs += m.rho()[i] * traj[k + i];
      rhs += m.h() * m.sigma()[i] * (-gradient(traj[k + i]));
    }
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

}  // namespace flowstep
