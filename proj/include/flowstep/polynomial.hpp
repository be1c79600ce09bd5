#pragma once

// Real-coefficient univariate polynomials and their complex roots.
//
// Coefficients are stored in ascending order: coefficient i multiplies z^i.
// Everything here is templated on the real scalar type so the same code
// serves float, double and long double.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <initializer_list>
#include <vector>

#include "flowstep/error.hpp"

namespace flowstep {

template <typename Scalar>
class Polynomial {
 public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Complex = std::complex<Scalar>;

  Polynomial() : coeffs_(Coefficients::Zero(1)) {}

  explicit Polynomial(Coefficients coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

  Polynomial(std::initializer_list<Scalar> coeffs) : coeffs_(static_cast<Eigen::Index>(coeffs.size())) {
    Eigen::Index i = 0;
    for (Scalar c : coeffs) coeffs_(i++) = c;
    normalize();
  }

  static Polynomial from_vector(const std::vector<Scalar>& coeffs) {
    Coefficients c(static_cast<Eigen::Index>(coeffs.size()));
    for (std::size_t i = 0; i < coeffs.size(); ++i) c(static_cast<Eigen::Index>(i)) = coeffs[i];
    return Polynomial(std::move(c));
  }

  static Polynomial constant(Scalar c) { return Polynomial({c}); }

  /// Monic polynomial with the given roots. Complex roots must come with
  /// their conjugates; the imaginary residue of the product is dropped.
  static Polynomial from_roots(const std::vector<Complex>& roots) {
    std::vector<Complex> acc{Complex(1)};
    for (const Complex& r : roots) {
      std::vector<Complex> next(acc.size() + 1, Complex(0));
      for (std::size_t i = 0; i < acc.size(); ++i) {
        next[i + 1] += acc[i];
        next[i] -= r * acc[i];
      }
      acc = std::move(next);
    }
    Coefficients c(static_cast<Eigen::Index>(acc.size()));
    for (std::size_t i = 0; i < acc.size(); ++i) c(static_cast<Eigen::Index>(i)) = acc[i].real();
    return Polynomial(std::move(c));
  }

  bool is_zero() const { return coeffs_.size() == 1 && coeffs_(0) == Scalar(0); }

  /// Degree of the polynomial; the zero polynomial reports 0 and is flagged
  /// through is_zero().
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  Scalar operator[](int i) const { return (i >= 0 && i <= degree()) ? coeffs_(i) : Scalar(0); }

  Scalar leading() const { return coeffs_(coeffs_.size() - 1); }

  bool is_monic(Scalar tol = Scalar(0)) const { return !is_zero() && std::abs(leading() - Scalar(1)) <= tol; }

  const Coefficients& coefficients() const { return coeffs_; }

  std::vector<Scalar> to_vector() const { return std::vector<Scalar>(coeffs_.data(), coeffs_.data() + coeffs_.size()); }

  Scalar max_abs_coefficient() const { return coeffs_.cwiseAbs().maxCoeff(); }

  template <typename T>
  T operator()(const T& z) const {
    T acc = T(coeffs_(coeffs_.size() - 1));
    for (Eigen::Index i = coeffs_.size() - 2; i >= 0; --i) acc = acc * z + T(coeffs_(i));
    return acc;
  }

  Polynomial derivative() const {
    if (degree() == 0) return Polynomial();
    Coefficients d(degree());
    for (int i = 1; i <= degree(); ++i) d(i - 1) = Scalar(i) * coeffs_(i);
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    const int n = std::max(a.degree(), b.degree()) + 1;
    Coefficients c(n);
    for (int i = 0; i < n; ++i) c(i) = a[i] + b[i];
    return Polynomial(std::move(c));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

  friend Polynomial operator-(const Polynomial& a) { return Polynomial(Coefficients(-a.coeffs_)); }

  friend Polynomial operator*(Scalar s, const Polynomial& p) { return Polynomial(Coefficients(s * p.coeffs_)); }

  friend Polynomial operator*(const Polynomial& p, Scalar s) { return s * p; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Coefficients c = Coefficients::Zero(a.degree() + b.degree() + 1);
    for (int i = 0; i <= a.degree(); ++i)
      for (int j = 0; j <= b.degree(); ++j) c(i + j) += a[i] * b[j];
    return Polynomial(std::move(c));
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.coeffs_.size() == b.coeffs_.size() && a.coeffs_ == b.coeffs_;
  }

 private:
  void normalize() {
    if (coeffs_.size() == 0) {
      coeffs_ = Coefficients::Zero(1);
      return;
    }
    Eigen::Index n = coeffs_.size();
    while (n > 1 && coeffs_(n - 1) == Scalar(0)) --n;
    coeffs_.conservativeResize(n);
  }

  Coefficients coeffs_;
};

using PolynomialD = Polynomial<double>;

template <typename Scalar>
struct Root {
  std::complex<Scalar> value;
  int multiplicity = 1;
};

template <typename Scalar>
struct RootSet {
  std::vector<Root<Scalar>> roots;
  Scalar tolerance = Scalar(0);

  int total_multiplicity() const {
    int m = 0;
    for (const auto& r : roots) m += r.multiplicity;
    return m;
  }

  Scalar max_modulus() const {
    Scalar best = Scalar(0);
    for (const auto& r : roots) best = std::max(best, std::abs(r.value));
    return best;
  }
};

template <typename Scalar>
struct RootConditionReport {
  bool satisfied = true;
  RootSet<Scalar> roots;
  std::vector<Root<Scalar>> offending;
};

template <typename Scalar>
constexpr Scalar default_root_tolerance() {
  return Scalar(1e-7);
}

template <typename Scalar, typename T>
T eval(const Polynomial<Scalar>& p, const T& z) {
  return p(z);
}

template <typename Scalar>
Polynomial<Scalar> derivative(const Polynomial<Scalar>& p) {
  return p.derivative();
}

namespace detail {

template <typename Scalar>
void quadratic_roots(Scalar a, Scalar b, Scalar c, std::vector<std::complex<Scalar>>& out) {
  Scalar disc = b * b - Scalar(4) * a * c;
  // A discriminant inside its own rounding error is a double root.
  const Scalar noise = Scalar(8) * std::numeric_limits<Scalar>::epsilon() * (b * b + Scalar(4) * std::abs(a * c));
  if (std::abs(disc) <= noise) disc = Scalar(0);
  if (disc >= Scalar(0)) {
    // q carries the sign of -b so the sum never cancels.
    const Scalar q = Scalar(-0.5) * (b + std::copysign(std::sqrt(disc), b));
    if (q == Scalar(0)) {
      out.emplace_back(Scalar(0));
      out.emplace_back(Scalar(0));
      return;
    }
    out.emplace_back(q / a);
    out.emplace_back(c / q);
  } else {
    const Scalar re = -b / (Scalar(2) * a);
    const Scalar im = std::sqrt(-disc) / (Scalar(2) * std::abs(a));
    out.emplace_back(re, im);
    out.emplace_back(re, -im);
  }
}

template <typename Scalar>
void companion_roots(const Polynomial<Scalar>& p, std::vector<std::complex<Scalar>>& out) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Complex = std::complex<Scalar>;
  const int n = p.degree();
  Matrix companion = Matrix::Zero(n, n);
  companion.diagonal(-1).setOnes();
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -p[i] / p.leading();

  Eigen::EigenSolver<Matrix> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "companion eigenvalues did not converge");

  const Polynomial<Scalar> dp = p.derivative();
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    Complex z = solver.eigenvalues()(i);
    Scalar residual = std::abs(p(z));
    for (int it = 0; it < 8 && residual > Scalar(0); ++it) {
      const Complex slope = dp(z);
      if (std::abs(slope) == Scalar(0)) break;
      const Complex candidate = z - p(z) / slope;
      const Scalar candidate_residual = std::abs(p(candidate));
      if (!(candidate_residual < residual)) break;
      z = candidate;
      residual = candidate_residual;
    }
    out.push_back(z);
  }
}

}  // namespace detail

/// All complex roots of p with multiplicities. Numerical roots closer than
/// tol * max(1, |r|) are merged into one root of higher multiplicity.
template <typename Scalar>
RootSet<Scalar> roots(const Polynomial<Scalar>& p, Scalar tol = default_root_tolerance<Scalar>()) {
  using Complex = std::complex<Scalar>;
  if (p.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "roots of the zero polynomial are undefined");

  RootSet<Scalar> result;
  result.tolerance = tol;
  if (p.degree() == 0) return result;

  std::vector<Complex> raw;
  raw.reserve(static_cast<std::size_t>(p.degree()));
  if (p.degree() == 1) {
    raw.emplace_back(-p[0] / p[1]);
  } else if (p.degree() == 2) {
    detail::quadratic_roots(p[2], p[1], p[0], raw);
  } else {
    detail::companion_roots(p, raw);
  }

  std::sort(raw.begin(), raw.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  struct Cluster {
    Complex sum;
    int count;
  };
  std::vector<Cluster> clusters;
  for (const Complex& z : raw) {
    bool merged = false;
    for (auto& c : clusters) {
      const Complex centre = c.sum / Scalar(c.count);
      if (std::abs(z - centre) <= tol * std::max(Scalar(1), std::abs(centre))) {
        c.sum += z;
        ++c.count;
        merged = true;
        break;
      }
    }
    if (!merged) clusters.push_back({z, 1});
  }
  for (const auto& c : clusters) result.roots.push_back({c.sum / Scalar(c.count), c.count});
  return result;
}

/// Root condition: every root in the closed unit disk and every root on the
/// unit circle (modulus within tol of 1) simple.
template <typename Scalar>
RootConditionReport<Scalar> root_condition(const Polynomial<Scalar>& p,
                                           Scalar tol = default_root_tolerance<Scalar>()) {
  RootConditionReport<Scalar> report;
  report.roots = roots(p, tol);
  for (const auto& r : report.roots.roots) {
    const Scalar modulus = std::abs(r.value);
    const bool outside = modulus > Scalar(1) + tol;
    const bool repeated_on_circle = modulus >= Scalar(1) - tol && r.multiplicity > 1;
    if (outside || repeated_on_circle) report.offending.push_back(r);
  }
  report.satisfied = report.offending.empty();
  return report;
}

}  // namespace flowstep
