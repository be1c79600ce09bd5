#pragma once

// Reproducible experiments behind the command-line front end.

#include <cstdint>
#include <string>
#include <vector>

#include "flowstep/multistep.hpp"
#include "flowstep/problems.hpp"

namespace flowstep {

/// Gaussian start x* + N(0, I) drawn from `seed`.
Vector random_start(const QuadraticProblem& q, std::uint64_t seed);

/// Unit-distance start whose eigen-coordinates are u_i / lambda_i^2 for a
/// Gaussian u, so ||x''(0)|| = ||A^2 (x0 - x*)|| stays O(1) whatever the
/// conditioning. Null-space directions are left at zero.
Vector smooth_start(const QuadraticProblem& q, std::uint64_t seed);

// -- Tracking the flow: Euler, Nesterov and Polyak on one quadratic ---------

struct FlowTrackingConfig {
  double mu = 1.0;
  double L = 100.0;
  int dimension = 10;
  std::uint64_t seed = 42;
  double t_max = 20.0;
  double accuracy = 1e-3;
  int flow_samples = 2001;
};

struct PanelRun {
  std::string method;
  double h = 0.0;
  Trajectory trajectory;
  long iterations_to_accuracy = -1;  // left panel: first k with ||x_k - x(t_max)|| <= accuracy
  double deviation = 0.0;            // right panel: max_k ||x_k - x(t_k)|| on [0, t_max]
  double deviation_half_step = 0.0;  // same with h / 2
};

struct FlowTrackingResult {
  SmoothProblem problem;
  Vector x0;
  Vector x_at_t_max;
  std::vector<PanelRun> own_step;     // each method at its optimal step, as the optimiser
  std::vector<PanelRun> common_step;  // every method integrating the flow with h = 1/L, exact-flow starts
  Trajectory flow;                    // exact flow sampled on [0, t_max]
};

/// Starts from smooth_start(q, seed + 1). Method order in both panels:
/// euler, nesterov, polyak.
FlowTrackingResult flow_tracking(const FlowTrackingConfig& cfg);

// -- Optimiser vs integrator ------------------------------------------------

struct CompareConfig {
  std::string pair;                 // nesterov:m1, polyak:m2, heavy_ball:m2, proxgrad:imex-euler,
                                    // mirror:negf-euler, universal:gode-imex
  std::string geometry = "entropy";  // mirror and universal pairs: entropy | euclidean
  double mu = 1.0;
  double L = 9.0;
  int dimension = 10;
  int iterations = 200;
  std::uint64_t seed = 1;
  double threshold = 1e-8;
};

struct CompareResult {
  std::string pair;
  std::string optimizer;
  std::string integrator;
  double max_relative_deviation = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

std::vector<std::string> compare_pairs();

/// Throws UnknownAlgorithm for an unsupported pair.
CompareResult compare(const CompareConfig& cfg);

// -- Rate sweeps -------------------------------------------------------------

struct SweepConfig {
  std::vector<std::string> methods{"euler", "m1", "m2"};
  double mu = 1.0;
  double L = 9.0;
  std::vector<double> kappa_grid;  // L = kappa * mu per cell
  std::vector<double> h_grid;      // fixed (mu, L), step replaced per cell
  int dimension = 10;
  std::uint64_t seed = 7;
  bool parallel = true;
};

struct SweepCell {
  std::string method;
  std::string parameter;  // "kappa", "h" or "none"
  double value = 0.0;
  double mu = 0.0;
  double L = 0.0;
  double h = 0.0;
  double predicted_rate = 0.0;
  double fitted_rate = 0.0;
  double r_squared = 0.0;
  std::string status;  // ok | diverged | insufficient_data | error: ...
};

/// euler (optimal step), m1, m2, polyak, nesterov for the interval [mu, L].
/// Throws UnknownAlgorithm for other names.
MultistepMethod builtin_method(const std::string& name, double mu, double L);

/// Cells come back in grid order whatever the evaluation order.
std::vector<SweepCell> sweep(const SweepConfig& cfg);

}  // namespace flowstep
