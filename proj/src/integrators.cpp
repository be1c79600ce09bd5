#include "flowstep/integrators.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <sstream>

namespace flowstep {

namespace {

void check_finite(const Vector& x, std::size_t k) {
  const double norm = x.norm();
  if (!std::isfinite(norm) || norm > kDivergenceThreshold) {
    std::ostringstream os;
    os << "iterate " << k << " has norm " << norm;
    throw Error(ErrorKind::NonFiniteIterate, os.str());
  }
}

void check_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidArgument, "step size must be positive");
}

}  // namespace

std::vector<Vector> bootstrap_starts(const MultistepMethod& m, const SmoothProblem& p, const Vector& x0,
                                     StartPolicy policy) {
  const int s = m.steps();
  const double h = m.h();
  std::vector<Vector> starts{x0};
  if (s == 1) return starts;

  switch (policy) {
    case StartPolicy::ExactFlow: {
      if (!p.exact_flow) throw Error(ErrorKind::PolicyUnavailable, p.name + " has no exact flow");
      for (int i = 1; i < s; ++i) starts.push_back(p.exact_flow(x0, h * i));
      break;
    }
    case StartPolicy::EulerWarmup: {
      for (int i = 1; i < s; ++i) starts.push_back(starts.back() - h * p.gradient(starts.back()));
      break;
    }
    case StartPolicy::MatchedAlgorithm: {
      // Indices below zero stand for x0 with a zero gradient contribution.
      std::vector<Vector> g{-p.gradient(x0)};
      for (int i = 1; i < s; ++i) {
        Vector next = Vector::Zero(x0.size());
        for (int j = 0; j < s; ++j) {
          const int idx = i - s + j;
          if (idx < 0) {
            next -= m.rho()[j] * x0;
          } else {
            next -= m.rho()[j] * starts[idx];
            next += (h * m.sigma()[j]) * g[idx];
          }
        }
        g.push_back(-p.gradient(next));
        starts.push_back(std::move(next));
      }
      break;
    }
  }
  return starts;
}

// ---------------------------------------------------------------------------

ImexMethod::ImexMethod(PolynomialD rho, PolynomialD sigma, PolynomialD gamma, double h)
    : rho_(std::move(rho)), sigma_(std::move(sigma)), gamma_(std::move(gamma)), h_(h) {
  if (rho_.degree() < 1 || !rho_.is_monic(1e-12)) throw Error(ErrorKind::InvalidArgument, "rho must be monic, degree >= 1");
  if (sigma_.degree() > rho_.degree() - 1 && !sigma_.is_zero())
    throw Error(ErrorKind::InvalidArgument, "explicit part sigma must have degree <= s - 1");
  if (gamma_.degree() > rho_.degree()) throw Error(ErrorKind::InvalidArgument, "gamma must have degree <= s");
  if (gamma_[rho_.degree()] < 0.0) throw Error(ErrorKind::InvalidArgument, "gamma_s must be non-negative");
  check_step(h_);
}

ImexMethod ImexMethod::euler(double h) { return ImexMethod({-1.0, 1.0}, {1.0}, {0.0, 1.0}, h); }

// ---------------------------------------------------------------------------

namespace {

Vector fixed_point_implicit_step(const SmoothProblem& p, const Vector& x, double h) {
  // z = x - h grad f(z) contracts when h L < 1.
  Vector z = x;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 500; ++it) {
    const Vector next = x - h * p.gradient(z);
    const double change = (next - z).norm();
    z = next;
    if (change <= 1e-12 * std::max(1.0, z.norm())) return z;
    if (it > 5 && change > previous) break;
    previous = change;
  }
  throw Error(ErrorKind::InnerSolveFailure, "implicit Euler fixed-point iteration does not contract");
}

}  // namespace

Trajectory implicit_euler(const SmoothProblem& p, double h, const Vector& x0, int n) {
  check_step(h);
  Trajectory traj;
  traj.method = "implicit_euler";
  traj.seed = p.seed;
  traj.push(x0, h);
  for (int k = 0; k < n; ++k) {
    const Vector& x = traj.back();
    Vector next;
    if (p.prox)
      next = p.prox(x, h);
    else if (p.hessian)
      next = newton_prox(p.value, p.gradient, p.hessian, x, h, 1e-12, 100);
    else
      next = fixed_point_implicit_step(p, x, h);
    check_finite(next, traj.size());
    traj.push(std::move(next), h);
  }
  return traj;
}

Trajectory implicit_euler(const Regularizer& omega, double h, const Vector& x0, int n) {
  check_step(h);
  Trajectory traj;
  traj.method = "implicit_euler(" + omega.name + ")";
  traj.push(x0, h);
  for (int k = 0; k < n; ++k) {
    Vector next = omega.prox(traj.back(), h);
    check_finite(next, traj.size());
    traj.push(std::move(next), h);
  }
  return traj;
}

Trajectory run_imex(const ImexMethod& m, const CompositeProblem& c, const std::vector<Vector>& starts, int n) {
  const int s = m.steps();
  if (static_cast<int>(starts.size()) != s) throw Error(ErrorKind::InvalidArgument, "run_imex needs s starting points");
  const double h = m.h();
  const double gamma_s = m.gamma()[s];

  bool needs_past_omega = false;
  for (int i = 0; i < s; ++i) needs_past_omega = needs_past_omega || m.gamma()[i] != 0.0;
  if (needs_past_omega && !c.omega.gradient && !c.omega.is_zero)
    throw Error(ErrorKind::InnerSolveFailure, "starting points need grad Omega, which is unavailable");
  if (gamma_s == 0.0 && needs_past_omega && !c.omega.gradient)
    throw Error(ErrorKind::InnerSolveFailure, "explicit treatment of Omega needs its gradient");

  auto omega_at = [&](const Vector& x) -> Vector {
    if (c.omega.gradient) return -c.omega.gradient(x);
    return Vector::Zero(x.size());
  };

  std::vector<Vector> x(starts.begin(), starts.end());
  std::vector<Vector> g, w;
  for (const auto& p : x) {
    g.push_back(-c.smooth.gradient(p));
    w.push_back(needs_past_omega ? omega_at(p) : Vector::Zero(p.size()));
  }

  for (int k = 0; k < n; ++k) {
    Vector known = Vector::Zero(x[0].size());
    for (int i = 0; i < s; ++i) {
      if (m.rho()[i] != 0.0) known -= m.rho()[i] * x[k + i];
      if (m.sigma()[i] != 0.0) known += (h * m.sigma()[i]) * g[k + i];
      if (m.gamma()[i] != 0.0) known += (h * m.gamma()[i]) * w[k + i];
    }
    Vector next, omega_next;
    if (gamma_s > 0.0) {
      next = c.omega.prox(known, h * gamma_s);
      omega_next = (next - known) / (h * gamma_s);
    } else {
      next = known;
      omega_next = needs_past_omega ? omega_at(next) : Vector::Zero(next.size());
    }
    check_finite(next, x.size());
    g.push_back(-c.smooth.gradient(next));
    w.push_back(std::move(omega_next));
    x.push_back(std::move(next));
  }
  Trajectory traj = constant_step_trajectory(std::move(x), h, "imex");
  traj.seed = c.smooth.seed;
  return traj;
}

Trajectory run_negf_euler(const SmoothProblem& p, const MirrorGeometry& geom, double h, const Vector& x0, int n) {
  check_step(h);
  if (!geom.in_domain(x0)) throw Error(ErrorKind::DomainViolation, "x0 outside the " + geom.name + " domain");
  Trajectory traj;
  traj.method = "negf_euler(" + geom.name + ")";
  traj.seed = p.seed;
  traj.push(x0, h);
  Vector y = geom.grad_d(x0);
  for (int k = 0; k < n; ++k) {
    y -= h * p.gradient(traj.back());
    Vector next = geom.grad_d_star(y);
    check_finite(next, traj.size());
    traj.push(std::move(next), h);
  }
  return traj;
}

Vector gode_projection(const Regularizer& omega, const MirrorGeometry& geom, const Vector& z, double h) {
  if (omega.is_zero) return z;
  if (geom.euclidean) return omega.prox(z, h);

  const double scale = std::max(1.0, z.norm());
  auto residual = [&](const Vector& y) -> Vector { return y + h * omega.gradient(geom.grad_d_star(y)) - z; };

  if (omega.gradient && omega.hessian) {
    Vector y = z;
    Vector F = residual(y);
    for (int it = 0; it < 100; ++it) {
      if (F.norm() <= 1e-14 * scale) return y;
      const Vector x = geom.grad_d_star(y);
      Matrix J = h * omega.hessian(x) * geom.hessian_d_star(y);
      J.diagonal().array() += 1.0;
      const Vector step = J.partialPivLu().solve(F);
      double t = 1.0;
      Vector candidate = y - step;
      Vector Fc = residual(candidate);
      while (t > 1e-10 && !(Fc.norm() < F.norm())) {
        t *= 0.5;
        candidate = y - t * step;
        Fc = residual(candidate);
      }
      if (t <= 1e-10) {
        if (F.norm() <= 1e-10 * scale) return y;
        break;
      }
      y = std::move(candidate);
      F = std::move(Fc);
    }
    if (F.norm() <= 1e-10 * scale) return y;
    throw Error(ErrorKind::InnerSolveFailure, "Newton on the dual projection did not converge");
  }

  if (omega.gradient) {
    Vector y = z;
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 1000; ++it) {
      const Vector next = z - h * omega.gradient(geom.grad_d_star(y));
      const double change = (next - y).norm();
      y = next;
      if (change <= 1e-14 * scale) return y;
      if (it > 5 && change >= previous) break;
      previous = change;
    }
    throw Error(ErrorKind::InnerSolveFailure, "dual projection fixed-point iteration does not contract");
  }

  throw Error(ErrorKind::InnerSolveFailure,
              "dual projection for non-differentiable Omega is only available in the Euclidean geometry");
}

Trajectory run_gode_imex(const CompositeProblem& c, const MirrorGeometry& geom, double h, const Vector& x0, int n) {
  check_step(h);
  if (!geom.in_domain(x0)) throw Error(ErrorKind::DomainViolation, "x0 outside the " + geom.name + " domain");
  Trajectory traj;
  traj.method = "gode_imex(" + geom.name + "," + c.omega.name + ")";
  traj.seed = c.smooth.seed;
  traj.push(x0, h);
  Vector y = geom.grad_d(x0);
  for (int k = 0; k < n; ++k) {
    const Vector z = y - h * c.smooth.gradient(traj.back());
    y = gode_projection(c.omega, geom, z, h);
    Vector next = geom.grad_d_star(y);
    check_finite(next, traj.size());
    traj.push(std::move(next), h);
  }
  return traj;
}

}  // namespace flowstep
