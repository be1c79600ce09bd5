#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace flowstep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Returns grad f(x). The flow field is g = -grad f.
using GradientOracle = std::function<Vector(const Vector&)>;
using ValueOracle = std::function<double(const Vector&)>;
/// t -> x(t) for a fixed initial point.
using FlowOracle = std::function<Vector(double)>;

/// Indexed iterates x_0, x_1, ... with the step h_k used to go from x_k to
/// x_{k+1}. Time of iterate k is t_k = sum_{i<k} h_i.
struct Trajectory {
  std::vector<Vector> points;
  std::vector<double> step_sizes;
  std::string method;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const Vector& operator[](std::size_t k) const { return points[k]; }
  const Vector& back() const { return points.back(); }

  /// h_k; the final iterate reports the last step taken (or 0 if none).
  double step(std::size_t k) const;
  double time(std::size_t k) const;
  std::vector<double> times() const;

  void push(Vector x, double h);
};

Trajectory constant_step_trajectory(std::vector<Vector> points, double h, std::string method = {});

/// max_k ||a_k - b_k|| / max_k ||b_k||, over the common prefix.
double max_relative_deviation(const Trajectory& a, const Trajectory& b);

/// max_k ||a_k - b_k||, over the common prefix.
double max_abs_deviation(const Trajectory& a, const Trajectory& b);

}  // namespace flowstep
