#include "flowstep/design.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flowstep {

namespace {

void check_interval(double mu, double L) {
  if (!(mu > 0.0) || !(mu <= L) || !std::isfinite(L)) {
    std::ostringstream os;
    os << "require 0 < mu <= L, got mu=" << mu << " L=" << L;
    throw Error(ErrorKind::InvalidInterval, os.str());
  }
}

}  // namespace

double beta(double mu, double L) {
  check_interval(mu, L);
  const double q = std::sqrt(mu / L);
  return (1.0 - q) / (1.0 + q);
}

double one_minus_beta(double mu, double L) {
  check_interval(mu, L);
  const double q = std::sqrt(mu / L);
  return 2.0 * q / (1.0 + q);
}

double one_minus_beta_squared(double mu, double L) {
  check_interval(mu, L);
  const double q = std::sqrt(mu / L);
  return 4.0 * q / ((1.0 + q) * (1.0 + q));
}

EulerDesign euler_optimal(double mu, double L) {
  check_interval(mu, L);
  return {MultistepMethod::euler(2.0 / (L + mu)), (L - mu) / (L + mu)};
}

double h_hat_upper_bound(double mu, double L) {
  check_interval(mu, L);
  const double s = 1.0 + std::sqrt(L / mu);
  return s * s / L;
}

OptimalRoots optimal_roots(double h_hat, double mu, double L) {
  const double upper = h_hat_upper_bound(mu, L);
  if (!(h_hat > 0.0) || !(h_hat < upper)) {
    std::ostringstream os;
    os << "h_hat=" << h_hat << " outside ]0, " << upper << "[";
    throw Error(ErrorKind::InfeasibleHhat, os.str());
  }
  const double a = 1.0 - std::sqrt(mu * h_hat);
  const double b = 1.0 - std::sqrt(L * h_hat);
  return {a * a, b * b};
}

MultistepMethod TwoStepDesign::method() const {
  return MultistepMethod({rho0, rho1, 1.0}, {sigma0, sigma1}, h);
}

double TwoStepDesign::predicted_rate() const { return std::sqrt(std::max(c_mu, c_L)); }

TwoStepDesign from_change_of_variables(double h_hat, double c_mu, double c_L, double mu, double L) {
  check_interval(mu, L);
  TwoStepDesign d;
  d.h_hat = h_hat;
  d.c_mu = c_mu;
  d.c_L = c_L;
  double h_sigma0 = 0.0;
  if (L > mu) {
    h_sigma0 = (c_L - c_mu) / (L - mu);
    d.rho0 = (L * c_mu - mu * c_L) / (L - mu);
  } else {
    if (std::abs(c_mu - c_L) > 1e-12 * std::max(1.0, std::abs(c_mu)))
      throw Error(ErrorKind::InvalidArgument, "mu == L requires c_mu == c_L");
    d.rho0 = c_mu;
  }
  if (!(std::abs(d.rho0) < 1.0)) throw Error(ErrorKind::InfeasibleHhat, "design violates |rho_0| < 1");
  d.h = h_hat / (1.0 - d.rho0);
  if (!(d.h > 0.0)) throw Error(ErrorKind::InfeasibleHhat, "design produces a non-positive step");
  d.sigma0 = h_sigma0 / d.h;
  d.rho1 = -(1.0 + d.rho0);
  d.sigma1 = 1.0 - d.rho0 - d.sigma0;
  return d;
}

TwoStepDesign design_of(const MultistepMethod& m, double mu, double L) {
  check_interval(mu, L);
  if (m.steps() != 2 || !m.is_explicit()) throw Error(ErrorKind::InvalidArgument, "design_of needs an explicit two-step method");
  TwoStepDesign d;
  d.rho0 = m.rho()[0];
  d.rho1 = m.rho()[1];
  d.sigma0 = m.sigma()[0];
  d.sigma1 = m.sigma()[1];
  d.h = m.h();
  d.h_hat = d.h * (1.0 - d.rho0);
  d.c_mu = d.rho0 + mu * d.h * d.sigma0;
  d.c_L = d.rho0 + L * d.h * d.sigma0;
  return d;
}

TwoStepDesign optimal_two_step(double h_hat, double mu, double L) {
  const OptimalRoots c = optimal_roots(h_hat, mu, L);
  return from_change_of_variables(h_hat, c.c_mu, c.c_L, mu, L);
}

MultistepMethod method_m1(double mu, double L) {
  const double b = beta(mu, L);
  const double gap = one_minus_beta(mu, L);
  return MultistepMethod({b, -(1.0 + b), 1.0}, {-b * gap, one_minus_beta_squared(mu, L)}, 1.0 / (L * gap));
}

MultistepMethod method_m2(double mu, double L) {
  const double b = beta(mu, L);
  const double b2 = b * b;
  return MultistepMethod({b2, -(1.0 + b2), 1.0}, {0.0, one_minus_beta_squared(mu, L)}, 1.0 / std::sqrt(mu * L));
}

ComplexRootCheck complex_root_conditions(const TwoStepDesign& d, double mu, double L) {
  check_interval(mu, L);
  auto discriminant_ok = [&](double lambda) {
    const double b = d.rho1 + lambda * d.h * d.sigma1;
    const double c = d.rho0 + lambda * d.h * d.sigma0;
    // Optimal designs sit exactly on the boundary b^2 = 4c.
    return b * b - 4.0 * c <= 1e-12 * std::max(1.0, b * b);
  };
  ComplexRootCheck r;
  r.holds = discriminant_ok(mu) && discriminant_ok(L);
  if (r.holds) r.max_squared_modulus = std::max(d.rho0 + mu * d.h * d.sigma0, d.rho0 + L * d.h * d.sigma0);
  return r;
}

ComplexRootCheck complex_root_conditions(const MultistepMethod& m, double mu, double L) {
  if (m.steps() != 2 || !m.is_explicit()) return {};
  return complex_root_conditions(design_of(m, mu, L), mu, L);
}

}  // namespace flowstep
