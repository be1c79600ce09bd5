#pragma once

// Drivers that integrate gradient flows: starting values for s-step
// methods, implicit Euler, multi-step IMEX, and Euler schemes for the
// non-Euclidean (mirror) flow with and without a composite term.

#include <vector>

#include "flowstep/multistep.hpp"
#include "flowstep/problems.hpp"

namespace flowstep {

enum class StartPolicy {
  ExactFlow,         // x_i = x(t_i); needs SmoothProblem::exact_flow
  MatchedAlgorithm,  // virtual history x_{-j} = x0 with zero gradient terms
  EulerWarmup,       // s-1 explicit Euler steps of size h
};

/// s starting points x_0, ..., x_{s-1} for method m.
///
/// MatchedAlgorithm reproduces the first steps of the optimiser that the
/// method encodes when that optimiser starts with zero momentum: heavy ball
/// with x_{-1} = x_0 and Nesterov with y_0 = x_0 both give
/// x_1 = x_0 - h sigma_1 grad f(x_0).
std::vector<Vector> bootstrap_starts(const MultistepMethod& m, const SmoothProblem& p, const Vector& x0,
                                     StartPolicy policy);

/// rho(E) x_k = h (sigma(E) g(x_k) + gamma(E) omega(x_k)) with g = -grad f
/// explicit and omega = -grad Omega implicit.
class ImexMethod {
 public:
  /// rho monic of degree s, deg(sigma) <= s - 1, deg(gamma) <= s, gamma_s >= 0.
  ImexMethod(PolynomialD rho, PolynomialD sigma, PolynomialD gamma, double h);

  /// rho = -1 + z, sigma = 1, gamma = z: forward step on f, backward on Omega.
  static ImexMethod euler(double h);

  const PolynomialD& rho() const { return rho_; }
  const PolynomialD& sigma() const { return sigma_; }
  const PolynomialD& gamma() const { return gamma_; }
  double h() const { return h_; }
  int steps() const { return rho_.degree(); }

 private:
  PolynomialD rho_;
  PolynomialD sigma_;
  PolynomialD gamma_;
  double h_;
};

/// x_{k+1} = x_k + h g(x_{k+1}). Uses p.prox when present, otherwise a
/// damped Newton solve (tolerance 1e-12, at most 100 iterations).
Trajectory implicit_euler(const SmoothProblem& p, double h, const Vector& x0, int n);

/// Implicit Euler on the flow of Omega alone, through its prox.
Trajectory implicit_euler(const Regularizer& omega, double h, const Vector& x0, int n);

/// Each step forms the explicit combination of the s past points and then
/// resolves the gamma_s omega(x_{k+s}) term with prox_{Omega, h gamma_s}.
/// omega at past points produced by prox is recovered from the prox step
/// itself, so non-differentiable Omega is supported unless the starting
/// points need it.
Trajectory run_imex(const ImexMethod& m, const CompositeProblem& c, const std::vector<Vector>& starts, int n);

/// y_{k+1} = y_k - h grad f(x_k), x_{k+1} = grad d*(y_{k+1}), y_0 = grad d(x0).
Trajectory run_negf_euler(const SmoothProblem& p, const MirrorGeometry& geom, double h, const Vector& x0, int n);

/// Explicit-implicit Euler on the generalised flow:
///   z_{k+1} = y_k + h g(x_k)                       (dual gradient step)
///   y_{k+1} + h grad Omega(grad d*(y_{k+1})) = z   (dual projection)
///   x_{k+1} = grad d*(y_{k+1})                     (back to primal)
/// The projection is solved by Newton when Omega is twice differentiable and
/// by fixed-point iteration on y when only its gradient is known. In the
/// Euclidean geometry it is prox_{Omega,h}.
Trajectory run_gode_imex(const CompositeProblem& c, const MirrorGeometry& geom, double h, const Vector& x0, int n);

/// Solves the dual projection equation above for a given z.
Vector gode_projection(const Regularizer& omega, const MirrorGeometry& geom, const Vector& z, double h);

}  // namespace flowstep
