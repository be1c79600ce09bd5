#include "flowstep/problems.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "flowstep/error.hpp"

namespace flowstep {

double SmoothProblem::gap(const Vector& x) const {
  if (!optimal_value) throw Error(ErrorKind::MissingMinimizer, name + " has no known optimal value");
  return value(x) - *optimal_value;
}

double SmoothProblem::distance(const Vector& x) const {
  if (!minimizer) throw Error(ErrorKind::MissingMinimizer, name + " has no known minimizer");
  return (x - *minimizer).norm();
}

// ---------------------------------------------------------------------------
// QuadraticProblem

QuadraticProblem::QuadraticProblem(Matrix A, Vector b, std::string name, std::uint64_t seed)
    : A_(std::move(A)), b_(std::move(b)), name_(std::move(name)), seed_(seed) {
  if (A_.rows() != A_.cols() || A_.rows() != b_.size() || b_.size() == 0)
    throw Error(ErrorKind::InvalidArgument, "quadratic needs a square A matching b");
  const double scale = std::max(1.0, A_.cwiseAbs().maxCoeff());
  if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorKind::EigenFailure, "quadratic matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(A_);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  if (eigenvalues_.minCoeff() < -1e-10 * scale)
    throw Error(ErrorKind::InvalidArgument, "quadratic matrix is not positive semidefinite");
  const double thr = zero_threshold();
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i)
    if (std::abs(eigenvalues_(i)) <= thr) eigenvalues_(i) = 0.0;

  Vector coords = eigenvectors_.transpose() * b_;
  for (Eigen::Index i = 0; i < coords.size(); ++i) coords(i) = eigenvalues_(i) > 0.0 ? coords(i) / eigenvalues_(i) : 0.0;
  minimizer_ = eigenvectors_ * coords;
  if ((A_ * minimizer_ - b_).norm() > 1e-8 * (1.0 + b_.norm()))
    throw Error(ErrorKind::InvalidArgument, "b is not in the range of A; f is unbounded below");
}

double QuadraticProblem::zero_threshold() const {
  return 1e-12 * std::max(1e-300, eigenvalues_.cwiseAbs().maxCoeff());
}

double QuadraticProblem::value(const Vector& x) const { return 0.5 * x.dot(A_ * x) - b_.dot(x); }

Vector QuadraticProblem::gradient(const Vector& x) const { return A_ * x - b_; }

Vector QuadraticProblem::prox(const Vector& x, double h) const {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "prox step must be positive");
  Vector coords = eigenvectors_.transpose() * (x + h * b_);
  coords.array() /= (1.0 + h * eigenvalues_.array());
  return eigenvectors_ * coords;
}

SmoothProblem QuadraticProblem::as_smooth() const {
  auto q = std::make_shared<const QuadraticProblem>(*this);
  SmoothProblem p;
  p.dimension = dimension();
  p.value = [q](const Vector& x) { return q->value(x); };
  p.gradient = [q](const Vector& x) { return q->gradient(x); };
  p.hessian = [q](const Vector&) { return q->A(); };
  p.mu = mu();
  p.L = L();
  p.minimizer = minimizer_;
  p.optimal_value = optimal_value();
  p.exact_flow = [q](const Vector& x0, double t) { return flowstep::exact_flow(*q, x0, t); };
  p.prox = [q](const Vector& x, double h) { return q->prox(x, h); };
  p.name = name_;
  p.seed = seed_;
  return p;
}

Vector exact_flow(const QuadraticProblem& q, const Vector& x0, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "flow time must be non-negative");
  Vector coords = q.eigenvectors().transpose() * (x0 - q.minimizer());
  coords.array() *= (-t * q.eigenvalues().array()).exp();
  return q.minimizer() + q.eigenvectors() * coords;
}

// ---------------------------------------------------------------------------
// Flows and bounds on general problems

namespace {

Vector rk4(const GradientOracle& gradient, const Vector& x0, double t, long steps) {
  const double h = t / static_cast<double>(steps);
  Vector x = x0;
  for (long i = 0; i < steps; ++i) {
    const Vector k1 = -gradient(x);
    const Vector k2 = -gradient(x + 0.5 * h * k1);
    const Vector k3 = -gradient(x + 0.5 * h * k2);
    const Vector k4 = -gradient(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace

Vector reference_flow(const SmoothProblem& p, const Vector& x0, double t, double tol) {
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "flow time must be non-negative");
  if (t == 0.0) return x0;
  long steps = std::max(8L, static_cast<long>(std::ceil(t * std::max(p.L, 1.0))));
  Vector coarse = rk4(p.gradient, x0, t, steps);
  constexpr long kMaxSteps = 1L << 24;
  while (steps < kMaxSteps) {
    steps *= 2;
    Vector fine = rk4(p.gradient, x0, t, steps);
    if ((fine - coarse).norm() <= tol) return fine;
    coarse = std::move(fine);
  }
  throw Error(ErrorKind::NoConvergence, "reference_flow refinement stalled");
}

double convex_rate_bound(const SmoothProblem& p, const Vector& x0, double t) {
  if (!p.minimizer) throw Error(ErrorKind::MissingMinimizer, "convex_rate_bound needs a known minimizer");
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "t must be non-negative");
  return (x0 - *p.minimizer).squaredNorm() / (t + 2.0 / p.L);
}

// ---------------------------------------------------------------------------
// Problem zoo

namespace {

Matrix random_orthogonal(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix G(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) G(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  return qr.householderQ();
}

Vector random_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = normal(rng);
  return v;
}

QuadraticProblem quadratic_from_spectrum(const Vector& spectrum, std::mt19937_64& rng, std::string name,
                                         std::uint64_t seed) {
  const int dim = static_cast<int>(spectrum.size());
  const Matrix Q = random_orthogonal(dim, rng);
  Matrix A = Q * spectrum.asDiagonal() * Q.transpose();
  A = 0.5 * (A + A.transpose()).eval();
  const Vector x_star = random_vector(dim, rng);
  Vector b = A * x_star;
  return QuadraticProblem(std::move(A), std::move(b), std::move(name), seed);
}

}  // namespace

QuadraticProblem random_quadratic(int dim, double mu, double L, std::uint64_t seed) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  if (!(mu > 0.0) || !(mu <= L)) throw Error(ErrorKind::InvalidInterval, "require 0 < mu <= L");
  if (dim == 1 && mu != L) throw Error(ErrorKind::InvalidArgument, "a 1-d quadratic cannot hold both mu and L");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(mu, L);
  Vector spectrum(dim);
  spectrum(0) = mu;
  if (dim > 1) spectrum(1) = L;
  for (int i = 2; i < dim; ++i) spectrum(i) = uniform(rng);
  std::ostringstream name;
  name << "random_quadratic(dim=" << dim << ",mu=" << mu << ",L=" << L << ")";
  return quadratic_from_spectrum(spectrum, rng, name.str(), seed);
}

QuadraticProblem singular_quadratic(int dim, double L, std::uint64_t seed) {
  if (dim < 2) throw Error(ErrorKind::InvalidArgument, "singular quadratic needs dim >= 2");
  if (!(L > 0.0)) throw Error(ErrorKind::InvalidInterval, "L must be positive");
  std::mt19937_64 rng(seed);
  Vector spectrum(dim);
  spectrum(0) = 0.0;
  for (int j = 1; j < dim; ++j) {
    const double r = static_cast<double>(j) / static_cast<double>(dim - 1);
    spectrum(j) = L * r * r;
  }
  std::ostringstream name;
  name << "singular_quadratic(dim=" << dim << ",L=" << L << ")";
  return quadratic_from_spectrum(spectrum, rng, name.str(), seed);
}

Vector slow_mode_start(const QuadraticProblem& q) {
  Vector coords = Vector::Zero(q.dimension());
  for (int i = 0; i < q.dimension(); ++i) {
    const double lambda = q.eigenvalues()(i);
    if (lambda > 0.0) coords(i) = std::pow(lambda, -0.25);
  }
  coords /= coords.norm();
  return q.minimizer() + q.eigenvectors() * coords;
}

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct LogisticData {
  Matrix features;  // samples x dim
  Vector labels;    // +-1
  double ridge;

  double value(const Vector& x) const {
    const Vector margins = labels.cwiseProduct(features * x);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) loss += softplus(-margins(i));
    return loss / static_cast<double>(margins.size()) + 0.5 * ridge * x.squaredNorm();
  }

  Vector gradient(const Vector& x) const {
    const Vector margins = labels.cwiseProduct(features * x);
    Vector weights(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) weights(i) = -labels(i) * sigmoid(-margins(i));
    return features.transpose() * weights / static_cast<double>(margins.size()) + ridge * x;
  }

  Matrix hessian(const Vector& x) const {
    const Vector margins = labels.cwiseProduct(features * x);
    Vector weights(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
      const double s = sigmoid(margins(i));
      weights(i) = s * (1.0 - s);
    }
    Matrix H = features.transpose() * weights.asDiagonal() * features / static_cast<double>(margins.size());
    H.diagonal().array() += ridge;
    return H;
  }
};

}  // namespace

SmoothProblem logistic_ridge(int samples, int dim, double ridge, std::uint64_t seed) {
  if (samples < 1 || dim < 1) throw Error(ErrorKind::InvalidArgument, "logistic_ridge needs samples, dim >= 1");
  if (!(ridge > 0.0)) throw Error(ErrorKind::InvalidInterval, "ridge must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto data = std::make_shared<LogisticData>();
  data->features.resize(samples, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < samples; ++i) data->features(i, j) = normal(rng);
  const Vector truth = random_vector(dim, rng);
  data->labels.resize(samples);
  for (int i = 0; i < samples; ++i) {
    const double score = data->features.row(i).dot(truth) + 0.5 * normal(rng);
    data->labels(i) = score >= 0.0 ? 1.0 : -1.0;
  }
  data->ridge = ridge;

  Eigen::SelfAdjointEigenSolver<Matrix> gram(data->features.transpose() * data->features);
  const double L = ridge + gram.eigenvalues().maxCoeff() / (4.0 * samples);

  // Newton with backtracking; the objective is strongly convex.
  Vector x = Vector::Zero(dim);
  for (int it = 0; it < 100; ++it) {
    const Vector g = data->gradient(x);
    if (g.norm() <= 1e-14) break;
    const Vector step = data->hessian(x).ldlt().solve(g);
    double t = 1.0;
    const double f0 = data->value(x);
    while (t > 1e-12 && data->value(x - t * step) > f0 - 1e-4 * t * g.dot(step)) t *= 0.5;
    x -= t * step;
    if (t <= 1e-12) break;
  }

  SmoothProblem p;
  p.dimension = dim;
  p.value = [data](const Vector& v) { return data->value(v); };
  p.gradient = [data](const Vector& v) { return data->gradient(v); };
  p.hessian = [data](const Vector& v) { return data->hessian(v); };
  p.mu = ridge;
  p.L = L;
  p.minimizer = x;
  p.optimal_value = data->value(x);
  std::ostringstream name;
  name << "logistic_ridge(m=" << samples << ",dim=" << dim << ",ridge=" << ridge << ")";
  p.name = name.str();
  p.seed = seed;
  return p;
}

// ---------------------------------------------------------------------------
// Regularizers and prox

Vector newton_prox(const ValueOracle& value, const GradientOracle& gradient, const HessianOracle& hessian,
                   const Vector& x, double h, double tol, int max_iterations) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "prox step must be positive");
  if (!gradient || !hessian) throw Error(ErrorKind::InnerSolveFailure, "Newton prox needs gradient and hessian");
  auto objective = [&](const Vector& z) { return 0.5 * (z - x).squaredNorm() + h * value(z); };
  const double scale = std::max(1.0, x.norm());
  Vector z = x;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector g = (z - x) + h * gradient(z);
    if (g.norm() <= tol * scale) return z;
    Matrix H = h * hessian(z);
    H.diagonal().array() += 1.0;
    const Vector step = H.ldlt().solve(g);
    double t = 1.0;
    const Vector full = z - step;
    const bool full_step_helps = ((full - x) + h * gradient(full)).norm() < g.norm();
    // Armijo only while the full step fails; close to the optimum the decrease in phi is rounding noise.
    if (value && !full_step_helps) {
      const double phi = objective(z);
      while (t > 1e-10 && !(objective(z - t * step) <= phi - 1e-4 * t * g.dot(step))) t *= 0.5;
      // Near the solution the decrease is below rounding; take the full step.
      if (t <= 1e-10) t = 1.0;
    }
    z -= t * step;
  }
  const Vector g = (z - x) + h * gradient(z);
  if (g.norm() <= tol * scale) return z;
  std::ostringstream os;
  os << "Newton prox did not reach tolerance, residual " << g.norm();
  throw Error(ErrorKind::InnerSolveFailure, os.str());
}

Regularizer zero_regularizer() {
  Regularizer r;
  r.name = "zero";
  r.value = [](const Vector&) { return 0.0; };
  r.prox = [](const Vector& x, double) { return x; };
  r.gradient = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
  r.hessian = [](const Vector& x) { return Matrix(Matrix::Zero(x.size(), x.size())); };
  r.is_zero = true;
  return r;
}

Regularizer squared_norm_regularizer(double weight) {
  Regularizer r;
  r.name = "squared_norm";
  r.value = [weight](const Vector& x) { return 0.5 * weight * x.squaredNorm(); };
  r.prox = [weight](const Vector& x, double h) { return Vector(x / (1.0 + h * weight)); };
  r.gradient = [weight](const Vector& x) { return Vector(weight * x); };
  r.hessian = [weight](const Vector& x) { return Matrix(weight * Matrix::Identity(x.size(), x.size())); };
  return r;
}

Regularizer l1_regularizer(double weight) {
  Regularizer r;
  r.name = "l1";
  r.value = [weight](const Vector& x) { return weight * x.lpNorm<1>(); };
  r.prox = [weight](const Vector& x, double h) {
    const double t = h * weight;
    Vector z(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double a = std::abs(x(i)) - t;
      z(i) = a > 0.0 ? std::copysign(a, x(i)) : 0.0;
    }
    return z;
  };
  return r;
}

Regularizer box_indicator(double lower, double upper) {
  if (!(lower <= upper)) throw Error(ErrorKind::InvalidArgument, "box needs lower <= upper");
  Regularizer r;
  r.name = "box";
  r.value = [lower, upper](const Vector& x) {
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lower), std::abs(upper)));
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x(i) < lower - slack || x(i) > upper + slack) return std::numeric_limits<double>::infinity();
    return 0.0;
  };
  r.prox = [lower, upper](const Vector& x, double) { return Vector(x.cwiseMax(lower).cwiseMin(upper)); };
  return r;
}

Regularizer smooth_regularizer(std::string name, ValueOracle value, GradientOracle gradient, HessianOracle hessian) {
  Regularizer r;
  r.name = std::move(name);
  r.value = value;
  r.gradient = gradient;
  r.hessian = hessian;
  r.prox = [value, gradient, hessian](const Vector& x, double h) {
    return newton_prox(value, gradient, hessian, x, h, 1e-10);
  };
  return r;
}

Vector prox(const CompositeProblem& c, const Vector& x, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "prox step must be positive");
  return c.omega.prox(x, h);
}

// ---------------------------------------------------------------------------
// Mirror geometries

double MirrorGeometry::bregman(const Vector& x, const Vector& y) const {
  return d(x) - d(y) - grad_d(y).dot(x - y);
}

MirrorGeometry euclidean_geometry() {
  MirrorGeometry g;
  g.name = "euclidean";
  g.d = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  g.grad_d = [](const Vector& x) { return x; };
  g.grad_d_star = [](const Vector& y) { return y; };
  g.hessian_d = [](const Vector& x) { return Matrix(Matrix::Identity(x.size(), x.size())); };
  g.hessian_d_star = [](const Vector& y) { return Matrix(Matrix::Identity(y.size(), y.size())); };
  g.in_domain = [](const Vector& x) { return x.allFinite(); };
  g.euclidean = true;
  return g;
}

namespace {

bool positive_orthant(const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x(i) > kEntropyDomainFloor) || !std::isfinite(x(i))) return false;
  return true;
}

void require_positive(const Vector& x, const char* where) {
  if (!positive_orthant(x)) {
    std::ostringstream os;
    os << where << ": point leaves the positive orthant (min coordinate " << x.minCoeff() << ")";
    throw Error(ErrorKind::DomainViolation, os.str());
  }
}

}  // namespace

MirrorGeometry entropy_geometry() {
  MirrorGeometry g;
  g.name = "entropy";
  g.d = [](const Vector& x) {
    require_positive(x, "entropy d");
    return (x.array() * x.array().log()).sum();
  };
  g.grad_d = [](const Vector& x) {
    require_positive(x, "entropy grad_d");
    return Vector(1.0 + x.array().log());
  };
  g.grad_d_star = [](const Vector& y) {
    Vector x = (y.array() - 1.0).exp();
    require_positive(x, "entropy grad_d_star");
    return x;
  };
  g.hessian_d = [](const Vector& x) {
    require_positive(x, "entropy hessian_d");
    return Matrix(x.cwiseInverse().asDiagonal());
  };
  g.hessian_d_star = [](const Vector& y) { return Matrix((y.array() - 1.0).exp().matrix().asDiagonal()); };
  g.in_domain = positive_orthant;
  return g;
}

}  // namespace flowstep
