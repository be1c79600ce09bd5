#pragma once

// Empirical measurements on trajectories: fitted geometric rates, decay
// exponents of function gaps, distance to the continuous flow, and global
// error as the step size shrinks.

#include <cstddef>
#include <limits>
#include <vector>

#include "flowstep/multistep.hpp"
#include "flowstep/problems.hpp"

namespace flowstep {

struct RateFit {
  double rate = 0.0;
  double r_squared = 0.0;
  std::size_t first = 0;  // fit window [first, last)
  std::size_t last = 0;
};

inline constexpr std::size_t kMinRateSamples = 30;
// Five periods of a period-two oscillation.
inline constexpr std::size_t kMinRateWindow = 10;
inline constexpr std::size_t kMinDecaySamples = 50;
inline constexpr double kTailFraction = 0.6;

/// Least-squares fit of log e_k = a + k log r over the last 60% of the
/// usable prefix, where usable means e_k > 1e3 * eps * e_0. Needs at least
/// kMinRateSamples errors and a window of kMinRateWindow usable ones; fast
/// rates reach the floor well before the 30th sample.
RateFit fit_geometric_rate(const std::vector<double>& errors);

/// Same fit on e_k = ||x_k - x*||.
RateFit fit_geometric_rate(const Trajectory& traj, const Vector& x_star);

struct DecayFit {
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Log-log least-squares slope of values[k] against k for k in [first, last].
DecayFit fit_decay_exponent(const std::vector<double>& values, std::size_t first, std::size_t last);

/// Slope over the last 60% of the values (values[k] is the gap at iteration
/// k; k = 0 is never used).
double fit_decay_exponent(const std::vector<double>& values);

/// max_k ||x_k - x(t_k)|| over iterates with t_k <= t_max.
double deviation_from_flow(const Trajectory& traj, const FlowOracle& flow,
                           double t_max = std::numeric_limits<double>::infinity());

/// First k with ||x_k - target|| <= eps, or -1.
long iterations_to_accuracy(const Trajectory& traj, const Vector& target, double eps);

struct GlobalErrorRow {
  double h = 0.0;
  long steps = 0;
  double max_error = 0.0;
  bool diverged = false;
};

/// For each h, runs base.with_step(h) from exact-flow starting values over
/// [0, t_max] and records max_k ||x_k - x(t_k)||. A run that crosses the
/// divergence threshold reports max_error = +inf.
std::vector<GlobalErrorRow> global_error_study(const MultistepMethod& base, const QuadraticProblem& q,
                                               const Vector& x0, double t_max, const std::vector<double>& h_list);

}  // namespace flowstep
