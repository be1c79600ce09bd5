#pragma once

#include <random>

#include "flowstep/problems.hpp"

namespace flowstep::testing {

inline QuadraticProblem scalar_quadratic(double lambda, double x_star = 0.0) {
  Matrix A(1, 1);
  A(0, 0) = lambda;
  Vector b(1);
  b(0) = lambda * x_star;
  return QuadraticProblem(A, b, "scalar");
}

inline Vector scalar(double v) {
  Vector x(1);
  x(0) = v;
  return x;
}

inline Vector gaussian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vector x(dim);
  for (int i = 0; i < dim; ++i) x(i) = n(rng);
  return x;
}

}  // namespace flowstep::testing
