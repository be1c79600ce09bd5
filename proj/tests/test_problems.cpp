#include "doctest.h"

#include <cmath>
#include <random>

#include "flowstep/error.hpp"
#include "flowstep/problems.hpp"
#include "support.hpp"

using namespace flowstep;
using flowstep::testing::gaussian;
using flowstep::testing::scalar;
using flowstep::testing::scalar_quadratic;

TEST_CASE("exact flow of a scalar ODE") {
  const QuadraticProblem q = scalar_quadratic(1.0);
  CHECK(exact_flow(q, scalar(1.0), 1.0)(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(exact_flow(q, scalar(1.0), 0.0)(0) == 1.0);
}

TEST_CASE("exact flow at t = 0 returns x0") {
  const QuadraticProblem q = random_quadratic(6, 1.0, 20.0, 3);
  std::mt19937_64 rng(1);
  const Vector x0 = gaussian(6, rng);
  CHECK((exact_flow(q, x0, 0.0) - x0).norm() <= 1e-14);
}

TEST_CASE("contraction of the flow") {
  const QuadraticProblem q = random_quadratic(5, 1.0, 9.0, 4);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const Vector x0 = gaussian(5, rng), y0 = gaussian(5, rng);
    const double d = (exact_flow(q, x0, 2.0) - exact_flow(q, y0, 2.0)).norm();
    CHECK(d <= std::exp(-2.0) * (x0 - y0).norm() * (1 + 1e-12));
  }
}

TEST_CASE("non-symmetric and indefinite matrices are rejected") {
  Matrix A(2, 2);
  A << 1, 2, 0, 1;
  try {
    QuadraticProblem q(A, Vector::Zero(2));
    FAIL("expected EigenFailure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EigenFailure);
  }
  Matrix B(2, 2);
  B << 1, 0, 0, -1;
  CHECK_THROWS_AS(QuadraticProblem(B, Vector::Zero(2)), Error);
}

TEST_CASE("flow semigroup") {
  const QuadraticProblem q = random_quadratic(8, 0.5, 30.0, 5);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Vector x0 = gaussian(8, rng);
    const double s = 0.3 * (i + 1) / 20.0, t = 0.7 * (i + 1) / 10.0;
    const Vector a = exact_flow(q, exact_flow(q, x0, s), t);
    const Vector b = exact_flow(q, x0, s + t);
    CHECK((a - b).norm() <= 1e-10);
  }
}

TEST_CASE("continuous-time strongly convex rates") {
  const QuadraticProblem q = random_quadratic(10, 0.7, 40.0, 6);
  const SmoothProblem p = q.as_smooth();
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    const Vector x0 = q.minimizer() + gaussian(10, rng);
    for (double t : {0.1, 0.5, 1.0, 3.0}) {
      const Vector x = exact_flow(q, x0, t);
      CHECK(p.distance(x) <= std::exp(-q.mu() * t) * p.distance(x0) * (1 + 1e-12));
      CHECK(p.gap(x) <= std::exp(-2 * q.mu() * t) * p.gap(x0) * (1 + 1e-9));
    }
  }
}

TEST_CASE("random quadratics") {
  const QuadraticProblem q = random_quadratic(12, 2.0, 300.0, 7);
  CHECK(q.mu() == doctest::Approx(2.0));
  CHECK(q.L() == doctest::Approx(300.0));
  for (int i = 0; i < 12; ++i) {
    CHECK(q.eigenvalues()(i) >= 2.0 - 1e-10);
    CHECK(q.eigenvalues()(i) <= 300.0 + 1e-10);
  }
  CHECK((q.A() * q.minimizer() - q.b()).norm() <= 1e-10 * q.b().norm());
  const QuadraticProblem again = random_quadratic(12, 2.0, 300.0, 7);
  CHECK(again.A() == q.A());
  CHECK(again.b() == q.b());
  CHECK(random_quadratic(12, 2.0, 300.0, 8).A() != q.A());
}

TEST_CASE("smoothness and strong convexity spot checks") {
  std::mt19937_64 rng(5);
  const QuadraticProblem q = random_quadratic(6, 1.0, 25.0, 9);
  const SmoothProblem logistic = logistic_ridge(80, 6, 0.1, 10);
  for (const SmoothProblem& p : {q.as_smooth(), logistic}) {
    for (int i = 0; i < 50; ++i) {
      const Vector x = gaussian(6, rng), y = gaussian(6, rng);
      const Vector dg = p.gradient(x) - p.gradient(y);
      CHECK(dg.norm() <= p.L * (x - y).norm() * (1 + 1e-12));
      CHECK(p.mu * (x - y).squaredNorm() <= (x - y).dot(dg) * (1 + 1e-12));
    }
  }
}

TEST_CASE("reference flow") {
  const QuadraticProblem q = random_quadratic(4, 1.0, 10.0, 11);
  const SmoothProblem p = q.as_smooth();
  std::mt19937_64 rng(6);
  const Vector x0 = gaussian(4, rng);
  CHECK((reference_flow(p, x0, 1.5, 1e-10) - exact_flow(q, x0, 1.5)).norm() <= 1e-9);
  CHECK(reference_flow(p, x0, 0.0) == x0);
}

TEST_CASE("logistic ridge follows the strongly convex rate") {
  const SmoothProblem p = logistic_ridge(60, 5, 0.5, 12);
  REQUIRE(p.minimizer);
  CHECK(p.gradient(*p.minimizer).norm() <= 1e-10);
  std::mt19937_64 rng(7);
  const Vector x0 = 2.0 * gaussian(5, rng);
  for (double t : {0.1, 1.0, 3.0}) {
    const Vector x = reference_flow(p, x0, t, 1e-11);
    CHECK(p.gap(x) <= std::exp(-2 * p.mu * t) * p.gap(x0) * (1 + 1e-6));
  }
}

TEST_CASE("convex rate bound") {
  const QuadraticProblem q = singular_quadratic(20, 4.0, 13);
  CHECK(q.mu() == 0.0);
  const SmoothProblem p = q.as_smooth();
  const Vector x0 = slow_mode_start(q);
  const double r2 = (x0 - q.minimizer()).squaredNorm();
  CHECK(convex_rate_bound(p, x0, 0.0) == doctest::Approx(q.L() * r2 / 2));
  for (double t : {0.1, 1.0, 10.0})
    CHECK(p.gap(exact_flow(q, x0, t)) <= convex_rate_bound(p, x0, t) * (1 + 1e-6));
  CHECK(convex_rate_bound(p, x0, 1e12) < 1e-10);

  SmoothProblem blind = p;
  blind.minimizer.reset();
  try {
    convex_rate_bound(blind, x0, 1.0);
    FAIL("expected MissingMinimizer");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingMinimizer);
  }
}

TEST_CASE("closed-form proximal operators") {
  CHECK(squared_norm_regularizer().prox(scalar(1.0), 1.0)(0) == 0.5);
  CHECK(l1_regularizer().prox(scalar(3.0), 1.0)(0) == 2.0);
  CHECK(l1_regularizer().prox(scalar(0.5), 1.0)(0) == 0.0);
  CHECK(l1_regularizer().prox(scalar(-3.0), 1.0)(0) == -2.0);
  CHECK(box_indicator(-1, 1).prox(scalar(4.0), 1.0)(0) == 1.0);
  CHECK(box_indicator(-1, 1).prox(scalar(0.3), 1.0)(0) == 0.3);
  CHECK(std::isinf(box_indicator(-1, 1).value(scalar(2.0))));
  CHECK(zero_regularizer().prox(scalar(0.3), 5.0)(0) == 0.3);
}

TEST_CASE("prox optimality for differentiable Omega") {
  // Omega(z) = sum cosh(z_i) has no closed-form prox.
  const Regularizer omega = smooth_regularizer(
      "cosh", [](const Vector& z) { return z.array().cosh().sum(); },
      [](const Vector& z) -> Vector { return z.array().sinh().matrix(); },
      [](const Vector& z) -> Matrix { return z.array().cosh().matrix().asDiagonal(); });
  std::mt19937_64 rng(8);
  for (int i = 0; i < 30; ++i) {
    const Vector x = 2.0 * gaussian(4, rng);
    for (double h : {0.1, 1.0, 5.0}) {
      const Vector z = omega.prox(x, h);
      CHECK(((z - x) / h + omega.gradient(z)).norm() <= 1e-8);
    }
  }
  const Vector x = gaussian(4, rng);
  const Vector z = squared_norm_regularizer(2.0).prox(x, 0.5);
  CHECK(((z - x) / 0.5 + 2.0 * z).norm() <= 1e-12);
}

TEST_CASE("prox is firmly nonexpansive") {
  const QuadraticProblem q = random_quadratic(5, 0.1, 10.0, 14);
  const SmoothProblem p = q.as_smooth();
  std::vector<ProxOracle> proxes{squared_norm_regularizer(3.0).prox, l1_regularizer(0.7).prox,
                                 box_indicator(-0.5, 0.5).prox, p.prox};
  std::mt19937_64 rng(9);
  for (const auto& prox_op : proxes) {
    for (int i = 0; i < 100; ++i) {
      const Vector x = gaussian(5, rng), y = gaussian(5, rng);
      const Vector px = prox_op(x, 0.8), py = prox_op(y, 0.8);
      CHECK((px - py).norm() <= (x - y).norm() * (1 + 1e-12));
      CHECK((px - py).squaredNorm() <= (px - py).dot(x - y) + 1e-12);
    }
  }
}

TEST_CASE("quadratic prox solves the resolvent") {
  const QuadraticProblem q = random_quadratic(6, 1.0, 50.0, 15);
  std::mt19937_64 rng(10);
  const Vector x = gaussian(6, rng);
  const Vector z = q.prox(x, 0.3);
  CHECK(((z - x) / 0.3 + q.gradient(z)).norm() <= 1e-10);
}

TEST_CASE("mirror geometries") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(1e-3, 5.0);
  for (const MirrorGeometry& g : {euclidean_geometry(), entropy_geometry()}) {
    for (int i = 0; i < 1000; ++i) {
      Vector x(4), y(4);
      for (int j = 0; j < 4; ++j) {
        x(j) = g.euclidean ? pos(rng) - 2.5 : pos(rng);
        y(j) = g.euclidean ? pos(rng) - 2.5 : pos(rng);
      }
      CHECK((g.grad_d_star(g.grad_d(x)) - x).norm() <= 1e-10 * std::max(1.0, x.norm()));
      CHECK(g.bregman(x, x) == doctest::Approx(0.0).epsilon(1e-14).scale(1.0));
      CHECK(g.bregman(x, y) >= -1e-12);
    }
  }
}

TEST_CASE("entropy domain") {
  const MirrorGeometry g = entropy_geometry();
  Vector x(2);
  x << 1.0, 0.0;
  CHECK_FALSE(g.in_domain(x));
  try {
    g.grad_d(x);
    FAIL("expected DomainViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DomainViolation);
  }
  x << 1.0, 1e-301;
  CHECK_THROWS_AS(g.grad_d(x), Error);
  x << 1.0, 2.0;
  CHECK(g.grad_d(x)(1) == doctest::Approx(1.0 + std::log(2.0)));
}

TEST_CASE("singular quadratic and the min-norm minimiser") {
  const QuadraticProblem q = singular_quadratic(10, 3.0, 16);
  CHECK(q.mu() == 0.0);
  CHECK(q.L() == doctest::Approx(3.0));
  const Vector null_dir = q.eigenvectors().col(0);
  CHECK(std::abs(null_dir.dot(q.minimizer())) <= 1e-12);
  const Vector x0 = slow_mode_start(q);
  CHECK((x0 - q.minimizer()).norm() == doctest::Approx(1.0));
  CHECK(std::abs(null_dir.dot(x0 - q.minimizer())) <= 1e-12);
}
