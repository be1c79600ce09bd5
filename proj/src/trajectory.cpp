#include "flowstep/trajectory.hpp"

#include <algorithm>
#include <limits>

namespace flowstep {

double Trajectory::step(std::size_t k) const {
  if (step_sizes.empty()) return 0.0;
  return k < step_sizes.size() ? step_sizes[k] : step_sizes.back();
}

double Trajectory::time(std::size_t k) const {
  double t = 0.0;
  const std::size_t n = std::min(k, step_sizes.size());
  for (std::size_t i = 0; i < n; ++i) t += step_sizes[i];
  return t;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t(points.size(), 0.0);
  for (std::size_t k = 1; k < points.size(); ++k) t[k] = t[k - 1] + step(k - 1);
  return t;
}

void Trajectory::push(Vector x, double h) {
  if (!points.empty()) step_sizes.push_back(h);
  points.push_back(std::move(x));
}

Trajectory constant_step_trajectory(std::vector<Vector> points, double h, std::string method) {
  Trajectory traj;
  traj.method = std::move(method);
  if (!points.empty()) traj.step_sizes.assign(points.size() - 1, h);
  traj.points = std::move(points);
  return traj;
}

double max_abs_deviation(const Trajectory& a, const Trajectory& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, (a[k] - b[k]).norm());
  return worst;
}

double max_relative_deviation(const Trajectory& a, const Trajectory& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, b[k].norm());
  return max_abs_deviation(a, b) / std::max(scale, std::numeric_limits<double>::min());
}

}  // namespace flowstep
