#include "flowstep/optimizers.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>
#include <string>

#include "flowstep/design.hpp"

namespace flowstep {

namespace {

void check_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidArgument, "step size must be positive");
}

void check_interval(double mu, double L) {
  if (!(mu > 0.0) || !(mu <= L)) throw Error(ErrorKind::InvalidInterval, "require 0 < mu <= L");
}

Trajectory start(const std::string& method, std::uint64_t seed, const Vector& x0, double h) {
  Trajectory traj;
  traj.method = method;
  traj.seed = seed;
  traj.push(x0, h);
  return traj;
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::GradientDescent: return "gradient_descent";
    case Algorithm::HeavyBall: return "heavy_ball";
    case Algorithm::NesterovStronglyConvex: return "nesterov_sc";
  }
  return "unknown";
}

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "gradient_descent" || name == "gd") return Algorithm::GradientDescent;
  if (name == "heavy_ball" || name == "polyak") return Algorithm::HeavyBall;
  if (name == "nesterov_sc" || name == "nesterov") return Algorithm::NesterovStronglyConvex;
  throw Error(ErrorKind::UnknownAlgorithm, "unknown algorithm '" + std::string(name) + "'");
}

Trajectory gradient_descent(const SmoothProblem& p, double h, const Vector& x0, int n) {
  check_step(h);
  Trajectory traj = start("gradient_descent", p.seed, x0, h);
  for (int k = 0; k < n; ++k) {
    const Vector& x = traj.back();
    Vector next = x - h * p.gradient(x);
    traj.push(std::move(next), h);
  }
  return traj;
}

HeavyBallParameters heavy_ball_parameters(double mu, double L) {
  const double b = beta(mu, L);
  return {one_minus_beta_squared(mu, L) / std::sqrt(mu * L), b * b};
}

Trajectory heavy_ball(const SmoothProblem& p, double mu, double L, const Vector& x0, int n) {
  check_interval(mu, L);
  const HeavyBallParameters c = heavy_ball_parameters(mu, L);
  const double h = 1.0 / std::sqrt(mu * L);
  Trajectory traj = start("heavy_ball", p.seed, x0, h);
  Vector previous = x0;
  for (int k = 0; k < n; ++k) {
    const Vector& x = traj.back();
    Vector next = x - c.step * p.gradient(x) + c.momentum * (x - previous);
    previous = x;
    traj.push(std::move(next), h);
  }
  return traj;
}

Trajectory nesterov_sc(const SmoothProblem& p, double mu, double L, const Vector& x0, int n) {
  check_interval(mu, L);
  const double b = beta(mu, L);
  const double h = 1.0 / (L * one_minus_beta(mu, L));
  Trajectory traj = start("nesterov_sc", p.seed, x0, h);
  Vector y = x0;
  for (int k = 0; k < n; ++k) {
    const Vector& x = traj.back();
    Vector y_next = x - p.gradient(x) / L;
    Vector next = y_next + b * (y_next - y);
    y = std::move(y_next);
    traj.push(std::move(next), h);
  }
  return traj;
}

double nesterov_convex_momentum(int k) {
  return std::max(0.0, static_cast<double>(k - 2) / static_cast<double>(k + 1));
}

double nesterov_convex_step(int k, double L) { return static_cast<double>(k + 2) / (3.0 * L); }

Trajectory nesterov_convex(const SmoothProblem& p, double L, const Vector& x0, int n) {
  if (!(L > 0.0)) throw Error(ErrorKind::InvalidInterval, "L must be positive");
  Trajectory traj;
  traj.method = "nesterov_convex";
  traj.seed = p.seed;
  traj.points.push_back(x0);
  Vector y = x0;
  for (int k = 0; k < n; ++k) {
    const Vector& x = traj.back();
    Vector y_next = x - p.gradient(x) / L;
    Vector next = y_next + nesterov_convex_momentum(k) * (y_next - y);
    y = std::move(y_next);
    traj.step_sizes.push_back(nesterov_convex_step(k, L));
    traj.points.push_back(std::move(next));
  }
  return traj;
}

Trajectory proximal_gradient(const CompositeProblem& c, double h, const Vector& x0, int n) {
  check_step(h);
  Trajectory traj = start("proximal_gradient", c.smooth.seed, x0, h);
  for (int k = 0; k < n; ++k) {
    const Vector& x = traj.back();
    const Vector y = x - h * c.smooth.gradient(x);
    traj.push(c.omega.prox(y, h), h);
  }
  return traj;
}

Trajectory proximal_point(const SmoothProblem& p, double h, const Vector& x0, int n) {
  check_step(h);
  if (!p.prox) throw Error(ErrorKind::InvalidArgument, p.name + " has no proximal operator");
  Trajectory traj = start("proximal_point", p.seed, x0, h);
  for (int k = 0; k < n; ++k) traj.push(p.prox(traj.back(), h), h);
  return traj;
}

Vector bregman_proximal_step(const MirrorGeometry& geom, const Regularizer& omega, const Vector& x,
                             const Vector& grad, double h) {
  if (geom.euclidean) {
    const Vector y = x - h * grad;
    return omega.is_zero ? y : omega.prox(y, h);
  }
  if (!omega.is_zero && !(omega.gradient && omega.hessian))
    throw Error(ErrorKind::InnerSolveFailure, "non-Euclidean Bregman step needs a twice differentiable Omega");

  const Vector target = geom.grad_d(x) - h * grad;
  const double scale = std::max(1.0, target.norm());
  auto residual = [&](const Vector& z) -> Vector {
    Vector r = geom.grad_d(z) - target;
    if (!omega.is_zero) r += h * omega.gradient(z);
    return r;
  };

  Vector z = x;
  Vector F = residual(z);
  for (int it = 0; it < 100; ++it) {
    if (F.norm() <= 1e-14 * scale) return z;
    Matrix J = geom.hessian_d(z);
    if (!omega.is_zero) J += h * omega.hessian(z);
    const Vector step = J.partialPivLu().solve(F);
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-10) {
      Vector candidate = z - t * step;
      if (geom.in_domain(candidate)) {
        Vector Fc = residual(candidate);
        if (Fc.norm() < F.norm()) {
          z = std::move(candidate);
          F = std::move(Fc);
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  if (F.norm() <= 1e-10 * scale) return z;
  std::ostringstream os;
  os << "Bregman proximal step did not converge, residual " << F.norm();
  throw Error(ErrorKind::InnerSolveFailure, os.str());
}

Trajectory mirror_descent(const SmoothProblem& p, const MirrorGeometry& geom, double h, const Vector& x0, int n) {
  check_step(h);
  if (!geom.in_domain(x0)) throw Error(ErrorKind::DomainViolation, "x0 outside the " + geom.name + " domain");
  const Regularizer none = zero_regularizer();
  Trajectory traj = start("mirror_descent(" + geom.name + ")", p.seed, x0, h);
  for (int k = 0; k < n; ++k) {
    const Vector& x = traj.back();
    traj.push(bregman_proximal_step(geom, none, x, p.gradient(x), h), h);
  }
  return traj;
}

Trajectory universal_gradient(const CompositeProblem& c, const MirrorGeometry& geom, double h, const Vector& x0,
                              int n) {
  check_step(h);
  if (!geom.in_domain(x0)) throw Error(ErrorKind::DomainViolation, "x0 outside the " + geom.name + " domain");
  Trajectory traj = start("universal_gradient(" + geom.name + "," + c.omega.name + ")", c.smooth.seed, x0, h);
  for (int k = 0; k < n; ++k) {
    const Vector& x = traj.back();
    traj.push(bregman_proximal_step(geom, c.omega, x, c.smooth.gradient(x), h), h);
  }
  return traj;
}

IdentifiedMethod identify_lmm(Algorithm a, double mu, double L, std::optional<double> step) {
  check_interval(mu, L);
  // rho and the combined coefficients (h sigma) read off the recursion.
  std::vector<double> rho, h_sigma;
  switch (a) {
    case Algorithm::GradientDescent: {
      const double s = step.value_or(1.0 / L);
      check_step(s);
      rho = {-1.0, 1.0};
      h_sigma = {s};
      break;
    }
    case Algorithm::HeavyBall: {
      const HeavyBallParameters c = heavy_ball_parameters(mu, L);
      rho = {c.momentum, -(1.0 + c.momentum), 1.0};
      h_sigma = {0.0, c.step};
      break;
    }
    case Algorithm::NesterovStronglyConvex: {
      const double b = beta(mu, L);
      rho = {b, -(1.0 + b), 1.0};
      h_sigma = {-b / L, (1.0 + b) / L};
      break;
    }
  }
  const PolynomialD rho_poly = PolynomialD::from_vector(rho);
  const PolynomialD h_sigma_poly = PolynomialD::from_vector(h_sigma);
  const double rho_prime = rho_poly.derivative()(1.0);
  if (rho_prime == 0.0) throw Error(ErrorKind::InvalidArgument, "rho'(1) = 0; h cannot be identified");
  const double h = h_sigma_poly(1.0) / rho_prime;
  const PolynomialD sigma_poly = (1.0 / h) * h_sigma_poly;

  IdentifiedMethod id{MultistepMethod(rho_poly, sigma_poly, h), a, 0.0, 0.0};
  id.rho_at_one = std::abs(rho_poly(1.0));
  id.extraction_residual = std::abs(h * rho_prime - h * sigma_poly(1.0));
  return id;
}

}  // namespace flowstep
