#pragma once

// Optimisation problems viewed as gradient flows x' = -grad f(x).
//
// SmoothProblem is a bag of oracles; QuadraticProblem additionally knows its
// spectrum and therefore its exact flow and proximal map. Composite problems
// pair a smooth part with a simple term Omega accessed through prox, and
// MirrorGeometry supplies the distance-generating function of a
// non-Euclidean flow.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "flowstep/trajectory.hpp"

namespace flowstep {

using HessianOracle = std::function<Matrix(const Vector&)>;
/// (x, h) -> argmin_z 0.5 ||z - x||^2 + h F(z)
using ProxOracle = std::function<Vector(const Vector&, double)>;
/// (x0, t) -> x(t)
using InitialValueFlow = std::function<Vector(const Vector&, double)>;

struct SmoothProblem {
  int dimension = 0;
  ValueOracle value;
  GradientOracle gradient;
  HessianOracle hessian;           // optional
  double mu = 0.0;
  double L = 0.0;
  std::optional<Vector> minimizer;
  std::optional<double> optimal_value;
  InitialValueFlow exact_flow;     // optional
  ProxOracle prox;                 // optional, prox of f itself
  std::string name;
  std::uint64_t seed = 0;

  /// f(x) - f*; requires optimal_value.
  double gap(const Vector& x) const;
  /// ||x - x*||; requires minimizer.
  double distance(const Vector& x) const;
};

/// f(x) = 0.5 x^T A x - b^T x with A symmetric positive semidefinite.
class QuadraticProblem {
 public:
  QuadraticProblem(Matrix A, Vector b, std::string name = "quadratic", std::uint64_t seed = 0);

  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  int dimension() const { return static_cast<int>(b_.size()); }
  double mu() const { return eigenvalues_.minCoeff() > zero_threshold() ? eigenvalues_.minCoeff() : 0.0; }
  double L() const { return eigenvalues_.maxCoeff(); }
  /// Minimum-norm minimiser (b must lie in the range of A).
  const Vector& minimizer() const { return minimizer_; }
  double optimal_value() const { return value(minimizer_); }
  const std::string& name() const { return name_; }
  std::uint64_t seed() const { return seed_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// (I + h A)^{-1} (x + h b).
  Vector prox(const Vector& x, double h) const;

  SmoothProblem as_smooth() const;

 private:
  double zero_threshold() const;

  Matrix A_;
  Vector b_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
  Vector minimizer_;
  std::string name_;
  std::uint64_t seed_;
};

/// x* + exp(-A t) (x0 - x*).
Vector exact_flow(const QuadraticProblem& q, const Vector& x0, double t);

/// RK4 with step halving until two successive refinements differ by <= tol.
Vector reference_flow(const SmoothProblem& p, const Vector& x0, double t, double tol = 1e-10);

/// ||x0 - x*||^2 / (t + 2/L), the continuous-time bound for convex f.
double convex_rate_bound(const SmoothProblem& p, const Vector& x0, double t);

/// Random SPD quadratic whose spectrum contains both mu and L.
QuadraticProblem random_quadratic(int dim, double mu, double L, std::uint64_t seed);

/// PSD quadratic with one zero eigenvalue and the others at L (j/(dim-1))^2.
QuadraticProblem singular_quadratic(int dim, double L, std::uint64_t seed);

/// Start on the unit sphere around the minimiser whose eigen-components
/// scale like lambda^{-1/4}, with no null-space component. On
/// singular_quadratic this excites the slow modes evenly.
Vector slow_mode_start(const QuadraticProblem& q);

/// (1/m) sum_i log(1 + exp(-y_i a_i^T x)) + (ridge/2) ||x||^2 with Gaussian
/// features. The minimiser is computed by Newton's method.
SmoothProblem logistic_ridge(int samples, int dim, double ridge, std::uint64_t seed);

struct Regularizer {
  std::string name;
  ValueOracle value;
  ProxOracle prox;
  GradientOracle gradient;   // empty when Omega is not differentiable
  HessianOracle hessian;     // empty when Omega is not twice differentiable
  bool is_zero = false;
};

Regularizer zero_regularizer();
/// (weight/2) ||z||^2
Regularizer squared_norm_regularizer(double weight = 1.0);
/// weight ||z||_1
Regularizer l1_regularizer(double weight = 1.0);
/// Indicator of [lower, upper]^d.
Regularizer box_indicator(double lower, double upper);
/// Generic twice-differentiable Omega; prox is a damped Newton solve.
Regularizer smooth_regularizer(std::string name, ValueOracle value, GradientOracle gradient, HessianOracle hessian);

/// Damped Newton on 0.5 ||z - x||^2 + h F(z), stopping when the gradient norm
/// is <= tol. Throws InnerSolveFailure after max_iterations.
Vector newton_prox(const ValueOracle& value, const GradientOracle& gradient, const HessianOracle& hessian,
                   const Vector& x, double h, double tol = 1e-12, int max_iterations = 100);

struct CompositeProblem {
  SmoothProblem smooth;
  Regularizer omega;

  double objective(const Vector& x) const { return smooth.value(x) + omega.value(x); }
};

Vector prox(const CompositeProblem& c, const Vector& x, double h);

struct MirrorGeometry {
  std::string name;
  ValueOracle d;
  std::function<Vector(const Vector&)> grad_d;
  std::function<Vector(const Vector&)> grad_d_star;
  HessianOracle hessian_d;        // in primal coordinates
  HessianOracle hessian_d_star;   // in dual coordinates
  std::function<bool(const Vector&)> in_domain;
  bool euclidean = false;

  /// d(x) - d(y) - <grad d(y), x - y>
  double bregman(const Vector& x, const Vector& y) const;
};

/// d(x) = 0.5 ||x||^2
MirrorGeometry euclidean_geometry();

/// d(x) = sum_i x_i log x_i on the positive orthant. Coordinates <= 1e-300
/// raise DomainViolation.
MirrorGeometry entropy_geometry();

inline constexpr double kEntropyDomainFloor = 1e-300;

}  // namespace flowstep
