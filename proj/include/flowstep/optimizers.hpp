#pragma once

// First-order optimisation algorithms in their usual formulations, and the
// map from an algorithm's recursion to the linear multi-step method hidden
// inside it.

#include <optional>
#include <string_view>

#include "flowstep/multistep.hpp"
#include "flowstep/problems.hpp"

namespace flowstep {

enum class Algorithm { GradientDescent, HeavyBall, NesterovStronglyConvex };

std::string_view to_string(Algorithm a);

/// Accepts gradient_descent|gd, heavy_ball|polyak, nesterov_sc|nesterov.
/// Throws UnknownAlgorithm otherwise.
Algorithm algorithm_from_string(std::string_view name);

/// x_{k+1} = x_k - h grad f(x_k).
Trajectory gradient_descent(const SmoothProblem& p, double h, const Vector& x0, int n);

struct HeavyBallParameters {
  double step;      // c1 = (1 - beta^2) / sqrt(mu L)
  double momentum;  // c2 = beta^2
};

HeavyBallParameters heavy_ball_parameters(double mu, double L);

/// x_{k+2} = x_{k+1} - c1 grad f(x_{k+1}) + c2 (x_{k+1} - x_k), with x_{-1} = x_0.
Trajectory heavy_ball(const SmoothProblem& p, double mu, double L, const Vector& x0, int n);

/// y_{k+1} = x_k - grad f(x_k) / L,  x_{k+1} = y_{k+1} + beta (y_{k+1} - y_k),  y_0 = x_0.
/// The trajectory holds the x-sequence.
Trajectory nesterov_sc(const SmoothProblem& p, double mu, double L, const Vector& x0, int n);

/// beta_k = max(0, (k - 2) / (k + 1)).
double nesterov_convex_momentum(int k);

/// Step of the gradient flow integrated by iteration k: (k + 2) / (3L).
double nesterov_convex_step(int k, double L);

/// Convex variant with momentum beta_k. step_sizes record the identified
/// integration steps h_k, so time(k) is the flow time reached by x_k.
Trajectory nesterov_convex(const SmoothProblem& p, double L, const Vector& x0, int n);

/// y_{k+1} = x_k - h grad f(x_k),  x_{k+1} = prox_{Omega,h}(y_{k+1}).
Trajectory proximal_gradient(const CompositeProblem& c, double h, const Vector& x0, int n);

/// x_{k+1} = prox_{f,h}(x_k) through p.prox.
Trajectory proximal_point(const SmoothProblem& p, double h, const Vector& x0, int n);

/// Solves grad d(x) + h grad Omega(x) = grad d(x_k) - h grad f(x_k) for x,
/// i.e. the first-order condition of
///   argmin_x h <grad f(x_k), x> + h Omega(x) + B_d(x, x_k).
/// Euclidean geometry: prox_{Omega,h}(x_k - h grad f(x_k)). Otherwise damped
/// Newton in primal coordinates, which needs Omega twice differentiable.
Vector bregman_proximal_step(const MirrorGeometry& geom, const Regularizer& omega, const Vector& x,
                             const Vector& grad, double h);

/// argmin_x h <grad f(x_k), x> + B_d(x, x_k).
Trajectory mirror_descent(const SmoothProblem& p, const MirrorGeometry& geom, double h, const Vector& x0, int n);

/// argmin_x h <grad f(x_k), x - x_k> + h Omega(x) + B_d(x, x_k).
Trajectory universal_gradient(const CompositeProblem& c, const MirrorGeometry& geom, double h, const Vector& x0,
                              int n);

struct IdentifiedMethod {
  MultistepMethod method;
  Algorithm source;
  double rho_at_one;          // |rho(1)|
  double extraction_residual; // |h rho'(1) - h sigma(1)| after extracting h
};

/// Writes the algorithm's recursion as rho(E) x_k = (h sigma)(E)(-grad f)_k
/// and extracts h from h rho'(1) = h sigma(1). `step` is the gradient
/// descent step (default 1/L); it is ignored for the momentum methods.
IdentifiedMethod identify_lmm(Algorithm a, double mu, double L, std::optional<double> step = std::nullopt);

}  // namespace flowstep
