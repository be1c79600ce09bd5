#include "doctest.h"

#include <cmath>
#include <limits>

#include "flowstep/analysis.hpp"
#include "flowstep/error.hpp"
#include "flowstep/integrators.hpp"
#include "support.hpp"

using namespace flowstep;
using flowstep::testing::scalar;
using flowstep::testing::scalar_quadratic;

TEST_CASE("geometric rate of a clean sequence") {
  std::vector<double> e;
  for (int k = 0; k < 100; ++k) e.push_back(std::pow(0.8, k));
  const RateFit fit = fit_geometric_rate(e);
  CHECK(std::abs(fit.rate - 0.8) <= 1e-6);
  CHECK(fit.r_squared >= 0.999999);
}

TEST_CASE("geometric rate through oscillation") {
  for (double r : {0.3, 0.7, 0.95}) {
    std::vector<double> e;
    const int n = r < 0.5 ? 40 : 400;
    for (int k = 0; k < n; ++k) e.push_back(std::pow(r, k) * (1.0 + 0.5 * (k % 2 == 0 ? 1.0 : -1.0)));
    CAPTURE(r);
    CHECK(std::abs(fit_geometric_rate(e).rate - r) <= 0.01);
  }
}

TEST_CASE("the rounding floor is excluded from the fit") {
  std::vector<double> e;
  for (int k = 0; k < 200; ++k) e.push_back(std::max(std::pow(0.5, k), 1e-17));
  const RateFit fit = fit_geometric_rate(e);
  CHECK(std::abs(fit.rate - 0.5) <= 1e-6);
  CHECK(fit.last < 50);
}

TEST_CASE("rate fit needs enough data") {
  std::vector<double> short_run(20, 1.0);
  try {
    fit_geometric_rate(short_run);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
  std::vector<double> collapses{1.0, 1e-18, 1e-18};
  collapses.resize(100, 1e-18);
  CHECK_THROWS_AS(fit_geometric_rate(collapses), Error);
}

TEST_CASE("decay exponent") {
  std::vector<double> v{1.0};
  for (int k = 1; k <= 500; ++k) v.push_back(1.0 / (k * static_cast<double>(k)));
  const DecayFit fit = fit_decay_exponent(v, 50, 500);
  CHECK(std::abs(fit.slope + 2.0) <= 0.01);
  CHECK(fit.r_squared >= 0.9999);
  CHECK(std::abs(fit_decay_exponent(v) + 2.0) <= 0.01);

  std::vector<double> shifted{1.0};
  for (int k = 1; k <= 500; ++k) shifted.push_back(1.0 / (k + 12.0));
  CHECK(std::abs(fit_decay_exponent(shifted, 50, 500).slope + 1.0) <= 0.1);

  CHECK_THROWS_AS(fit_decay_exponent(v, 50, 60), Error);
  v[100] = 0.0;
  try {
    fit_decay_exponent(v, 50, 500);
    FAIL("expected NonPositiveValue");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveValue);
  }
}

TEST_CASE("deviation from a flow") {
  const QuadraticProblem q = scalar_quadratic(2.0);
  const FlowOracle flow = [&q](double t) { return exact_flow(q, scalar(1.0), t); };
  std::vector<Vector> samples;
  for (int k = 0; k <= 10; ++k) samples.push_back(flow(0.1 * k));
  CHECK(deviation_from_flow(constant_step_trajectory(samples, 0.1), flow) <= 1e-15);

  samples[7](0) += 0.25;
  samples[10](0) += 1.0;
  const Trajectory bumped = constant_step_trajectory(samples, 0.1);
  CHECK(deviation_from_flow(bumped, flow) == doctest::Approx(1.0));
  CHECK(deviation_from_flow(bumped, flow, 0.85) == doctest::Approx(0.25));
}

TEST_CASE("iterations to accuracy") {
  std::vector<Vector> pts;
  for (int k = 0; k < 10; ++k) pts.push_back(scalar(std::pow(0.5, k)));
  const Trajectory t = constant_step_trajectory(pts, 1.0);
  CHECK(iterations_to_accuracy(t, scalar(0.0), 0.1) == 4);
  CHECK(iterations_to_accuracy(t, scalar(0.0), 1e-9) == -1);
}

TEST_CASE("global error study on the scalar equation") {
  const QuadraticProblem q = scalar_quadratic(1.0);
  const auto rows = global_error_study(MultistepMethod::euler(0.1), q, scalar(1.0), 2.0, {0.1, 0.05, 0.025});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].h == 0.1);
  CHECK(rows[2].steps == 80);
  CHECK(rows[0].max_error > rows[1].max_error);
  CHECK(rows[1].max_error > rows[2].max_error);
  // Euler error constant: max_t t e^{-t} / 2 = 1/(2e).
  CHECK(rows[2].max_error / 0.025 == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(0.05));
}

TEST_CASE("zero-unstable methods lose convergence") {
  // Consistent (rho(1) = 0, rho'(1) = sigma(1) = 6), spurious root -5.
  const MultistepMethod unstable({-5.0, 4.0, 1.0}, {2.0, 4.0}, 0.1);
  const QuadraticProblem q = scalar_quadratic(1.0);
  const auto rows = global_error_study(unstable, q, scalar(1.0), 1.0, {0.1, 0.05, 0.025, 0.0125});
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    CHECK_FALSE(rows[i + 1].diverged);
    CHECK(rows[i + 1].max_error > rows[i].max_error);
  }
  const auto blown = global_error_study(unstable, q, scalar(1.0), 20.0, {0.01});
  CHECK(blown[0].diverged);
  CHECK(std::isinf(blown[0].max_error));
}
