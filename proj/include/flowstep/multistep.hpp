#pragma once

// Linear s-step methods rho(E) x_k = h sigma(E) g_k applied to the gradient
// flow g = -grad f, and the tools to analyse them: consistency, the root
// condition, absolute stability on [mu, L] and the predicted linear rate.

#include <vector>

#include "flowstep/polynomial.hpp"
#include "flowstep/trajectory.hpp"

namespace flowstep {

class MultistepMethod {
 public:
  /// rho must be monic of degree s >= 1, deg(sigma) <= s and h > 0.
  MultistepMethod(PolynomialD rho, PolynomialD sigma, double h);

  static MultistepMethod euler(double h);

  const PolynomialD& rho() const { return rho_; }
  const PolynomialD& sigma() const { return sigma_; }
  double h() const { return h_; }
  int steps() const { return rho_.degree(); }
  bool is_explicit() const { return sigma_[steps()] == 0.0; }

  MultistepMethod with_step(double h) const { return MultistepMethod(rho_, sigma_, h); }

 private:
  PolynomialD rho_;
  PolynomialD sigma_;
  double h_;
};

inline constexpr double kConsistencyTolerance = 1e-10;
inline constexpr double kDivergenceThreshold = 1e100;
inline constexpr int kDefaultLambdaGrid = 129;

struct ConsistencyReport {
  bool consistent = false;
  double rho_at_one = 0.0;       // |rho(1)|
  double derivative_gap = 0.0;   // |rho'(1) - sigma(1)|
};

struct StabilityReport {
  bool consistent = false;
  bool zero_stable = false;
  double rho_at_one = 0.0;
  double derivative_gap = 0.0;
  RootSet<double> rho_roots;
  std::vector<Root<double>> offending_roots;
};

struct RatePrediction {
  double r_max = 0.0;
  int multiplicity = 1;
  double argmax_lambda = 0.0;
};

ConsistencyReport is_consistent(const MultistepMethod& m, double tol = kConsistencyTolerance);

bool is_zero_stable(const MultistepMethod& m, double tol = default_root_tolerance<double>());

StabilityReport analyze(const MultistepMethod& m, double consistency_tol = kConsistencyTolerance,
                        double root_tol = default_root_tolerance<double>());

/// pi_{lambda h} = rho + (lambda h) sigma.
PolynomialD characteristic_polynomial(const MultistepMethod& m, double lambda_h);

bool in_stability_region(const MultistepMethod& m, double lambda_h, double tol = default_root_tolerance<double>());

/// True if lambda h is in the stability region for every lambda on the grid.
bool absolutely_stable_on(const MultistepMethod& m, double mu, double L, int grid_size = kDefaultLambdaGrid,
                          double tol = default_root_tolerance<double>());

/// Maximum root modulus of pi_{lambda h} over a uniform lambda grid on
/// [mu, L] (both endpoints included).
RatePrediction rate_prediction(const MultistepMethod& m, double mu, double L, int grid_size = kDefaultLambdaGrid);

/// (x(t_{k+s}) - x_{k+s}) / h where x_{k+s} is one step of the method from
/// exact history x(t_k), ..., x(t_{k+s-1}). Explicit methods only.
Vector truncation_error(const MultistepMethod& m, const FlowOracle& flow, const GradientOracle& gradient, int k);

/// Runs an explicit method from s starting points for n further steps.
/// Throws NonFiniteIterate once an iterate norm exceeds kDivergenceThreshold.
Trajectory run(const MultistepMethod& m, const GradientOracle& gradient, const std::vector<Vector>& starts, int n);

/// max_k ||rho(E) x_k - h sigma(E) g_k|| over a trajectory.
double max_recurrence_residual(const MultistepMethod& m, const GradientOracle& gradient, const Trajectory& traj);

}  // namespace flowstep
