#include "flowstep/analysis.hpp"

#include <cmath>
#include <sstream>

#include "flowstep/integrators.hpp"

namespace flowstep {

namespace {

struct LineFit {
  double slope;
  double intercept;
  double r_squared;
};

LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss_res += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

}  // namespace

RateFit fit_geometric_rate(const std::vector<double>& errors) {
  if (errors.size() < kMinRateSamples) {
    std::ostringstream os;
    os << "only " << errors.size() << " iterates (need " << kMinRateSamples << ")";
    throw Error(ErrorKind::InsufficientData, os.str());
  }
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * errors.front();
  std::size_t usable = 0;
  while (usable < errors.size() && errors[usable] > floor && std::isfinite(errors[usable])) ++usable;
  const std::size_t window = static_cast<std::size_t>(std::ceil(kTailFraction * static_cast<double>(usable)));
  if (window < kMinRateWindow) {
    std::ostringstream os;
    os << "only " << usable << " iterates above the rounding floor";
    throw Error(ErrorKind::InsufficientData, os.str());
  }
  RateFit fit;
  fit.first = usable - window;
  fit.last = usable;
  std::vector<double> ks, logs;
  for (std::size_t k = fit.first; k < fit.last; ++k) {
    ks.push_back(static_cast<double>(k));
    logs.push_back(std::log(errors[k]));
  }
  const LineFit line = least_squares(ks, logs);
  fit.rate = std::exp(line.slope);
  fit.r_squared = line.r_squared;
  return fit;
}

RateFit fit_geometric_rate(const Trajectory& traj, const Vector& x_star) {
  std::vector<double> errors;
  errors.reserve(traj.size());
  for (const auto& x : traj.points) errors.push_back((x - x_star).norm());
  return fit_geometric_rate(errors);
}

DecayFit fit_decay_exponent(const std::vector<double>& values, std::size_t first, std::size_t last) {
  if (first == 0) first = 1;
  if (last >= values.size() || first > last || last - first + 1 < kMinDecaySamples)
    throw Error(ErrorKind::InsufficientData, "decay fit needs at least 50 points inside the data");
  std::vector<double> xs, ys;
  for (std::size_t k = first; k <= last; ++k) {
    if (!(values[k] > 0.0)) {
      std::ostringstream os;
      os << "value at k=" << k << " is not positive";
      throw Error(ErrorKind::NonPositiveValue, os.str());
    }
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(values[k]));
  }
  const LineFit line = least_squares(xs, ys);
  return {line.slope, line.r_squared};
}

double fit_decay_exponent(const std::vector<double>& values) {
  if (values.size() < kMinDecaySamples + 1) throw Error(ErrorKind::InsufficientData, "decay fit needs >= 50 points");
  const std::size_t n = values.size() - 1;  // k = 1..n
  const std::size_t window = static_cast<std::size_t>(std::ceil(kTailFraction * static_cast<double>(n)));
  const std::size_t first = std::max<std::size_t>(1, values.size() - window);
  return fit_decay_exponent(values, first, values.size() - 1).slope;
}

double deviation_from_flow(const Trajectory& traj, const FlowOracle& flow, double t_max) {
  double worst = 0.0;
  double t = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (k > 0) t += traj.step(k - 1);
    if (t > t_max * (1.0 + 1e-12)) break;
    worst = std::max(worst, (traj[k] - flow(t)).norm());
  }
  return worst;
}

long iterations_to_accuracy(const Trajectory& traj, const Vector& target, double eps) {
  for (std::size_t k = 0; k < traj.size(); ++k)
    if ((traj[k] - target).norm() <= eps) return static_cast<long>(k);
  return -1;
}

std::vector<GlobalErrorRow> global_error_study(const MultistepMethod& base, const QuadraticProblem& q,
                                               const Vector& x0, double t_max, const std::vector<double>& h_list) {
  const SmoothProblem p = q.as_smooth();
  const FlowOracle flow = [&](double t) { return exact_flow(q, x0, t); };
  std::vector<GlobalErrorRow> rows;
  for (double h : h_list) {
    const MultistepMethod m = base.with_step(h);
    GlobalErrorRow row;
    row.h = h;
    row.steps = std::lround(t_max / h);
    const int s = m.steps();
    try {
      const auto starts = bootstrap_starts(m, p, x0, StartPolicy::ExactFlow);
      const Trajectory traj = run(m, p.gradient, starts, static_cast<int>(std::max<long>(0, row.steps - (s - 1))));
      row.max_error = deviation_from_flow(traj, flow);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonFiniteIterate) throw;
      row.diverged = true;
      row.max_error = std::numeric_limits<double>::infinity();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace flowstep
