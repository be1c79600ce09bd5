#pragma once

// Optimal one- and two-step methods for the gradient flow of functions with
// curvature in [mu, L].
//
// Two-step designs are parametrised by the transformed step
//   h_hat = h (1 - rho_0),  c_mu = rho_0 + mu h sigma_0,  c_L = rho_0 + L h sigma_0,
// where c_mu and c_L are the squared root moduli of pi_{lambda h} at the two
// ends of the curvature interval (when those roots are complex).

#include "flowstep/multistep.hpp"

namespace flowstep {

/// (1 - sqrt(mu/L)) / (1 + sqrt(mu/L)).
double beta(double mu, double L);

/// 1 - beta = 2q/(1+q) and 1 - beta^2 = 4q/(1+q)^2 with q = sqrt(mu/L),
/// without the cancellation of the naive forms when L >> mu. The error of
/// 1 - beta^2 is multiplied by L h = sqrt(L/mu) in pi at lambda = L.
double one_minus_beta(double mu, double L);
double one_minus_beta_squared(double mu, double L);

struct EulerDesign {
  MultistepMethod method;
  double rate;
};

/// Euler with h = 2/(L+mu), the minimiser of max_{lambda in [mu,L]} |1 - lambda h|.
EulerDesign euler_optimal(double mu, double L);

struct OptimalRoots {
  double c_mu;
  double c_L;
};

/// Supremum of the admissible h_hat: beyond it |rho_0| >= 1.
double h_hat_upper_bound(double mu, double L);

/// c*_mu = (1 - sqrt(mu h_hat))^2, c*_L = (1 - sqrt(L h_hat))^2.
/// Throws InfeasibleHhat unless 0 < h_hat < h_hat_upper_bound(mu, L).
OptimalRoots optimal_roots(double h_hat, double mu, double L);

struct TwoStepDesign {
  double h_hat = 0.0;
  double c_mu = 0.0;
  double c_L = 0.0;
  double rho0 = 0.0;
  double rho1 = 0.0;
  double sigma0 = 0.0;
  double sigma1 = 0.0;
  double h = 0.0;

  MultistepMethod method() const;
  double predicted_rate() const;
};

/// Inverts the change of variables under the consistency constraints
/// rho_1 = -(1 + rho_0), sigma_1 = 1 - rho_0 - sigma_0.
TwoStepDesign from_change_of_variables(double h_hat, double c_mu, double c_L, double mu, double L);

/// Recovers (h_hat, c_mu, c_L) from an explicit two-step method.
TwoStepDesign design_of(const MultistepMethod& m, double mu, double L);

/// Family member for a given h_hat with optimal roots.
TwoStepDesign optimal_two_step(double h_hat, double mu, double L);

/// h_hat = 1/L.
MultistepMethod method_m1(double mu, double L);

/// h_hat = (1 + beta)^2 / L, which balances c_mu = c_L.
MultistepMethod method_m2(double mu, double L);

struct ComplexRootCheck {
  bool holds = false;
  /// max{rho_0 + mu h sigma_0, rho_0 + L h sigma_0}; meaningful only if holds.
  double max_squared_modulus = 0.0;
};

/// Both endpoint discriminant inequalities
///   (rho_1 + lambda h sigma_1)^2 <= 4 (rho_0 + lambda h sigma_0),  lambda in {mu, L}.
ComplexRootCheck complex_root_conditions(const TwoStepDesign& d, double mu, double L);

/// Same check on an arbitrary method; anything that is not two-step fails.
ComplexRootCheck complex_root_conditions(const MultistepMethod& m, double mu, double L);

}  // namespace flowstep
