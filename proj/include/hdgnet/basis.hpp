#pragma once

// Legendre reference basis on [-1, 1] with Gauss-Legendre quadrature and
// Gauss-Lobatto interpolation nodes.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "hdgnet/errors.hpp"

namespace hdgnet {

/// Values P_0(x)..P_n(x) and derivatives of the Legendre polynomials.
inline void legendre_all(int n, double x, std::vector<double>& p, std::vector<double>& dp) {
  p.assign(static_cast<std::size_t>(n) + 1, 0.0);
  dp.assign(static_cast<std::size_t>(n) + 1, 0.0);
  p[0] = 1.0;
  if (n == 0) return;
  p[1] = x;
  dp[1] = 1.0;
  for (int j = 2; j <= n; ++j) {
    p[j] = ((2.0 * j - 1.0) * x * p[j - 1] - (j - 1.0) * p[j - 2]) / j;
    // P_j' = P_{j-2}' + (2j-1) P_{j-1}
    dp[j] = dp[j - 2] + (2.0 * j - 1.0) * p[j - 1];
  }
}

inline std::pair<double, double> legendre(int n, double x) {
  std::vector<double> p, dp;
  legendre_all(n, x, p, dp);
  return {p[static_cast<std::size_t>(n)], dp[static_cast<std::size_t>(n)]};
}

struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1], exact for degree 2n - 1.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: need at least one point");
  QuadratureRule q;
  q.points.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = legendre(n, x);
    (void)p;
    q.points[static_cast<std::size_t>(n - 1 - i)] = x;
    q.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

/// n-point Gauss-Lobatto nodes on [-1, 1] (n >= 2): endpoints plus roots of P_{n-1}'.
inline std::vector<double> gauss_lobatto_nodes(int n) {
  if (n < 2) throw InvalidArgument("gauss_lobatto_nodes: need at least two points");
  std::vector<double> x(static_cast<std::size_t>(n));
  x.front() = -1.0;
  x.back() = 1.0;
  const int m = n - 1;
  for (int i = 1; i < m; ++i) {
    double xi = -std::cos(std::numbers::pi * i / m);
    for (int it = 0; it < 100; ++it) {
      // Newton on q(x) = P_m'(x), using (1-x^2) P_m'' = 2x P_m' - m(m+1) P_m
      const auto [p, dp] = legendre(m, xi);
      const double ddp = (2.0 * xi * dp - m * (m + 1.0) * p) / (1.0 - xi * xi);
      const double dx = dp / ddp;
      xi -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = xi;
  }
  return x;
}

/// Reference basis of P_k: phi_j = P_j on [-1, 1], integrated with a
/// (k + 2)-point Gauss rule.
class Basis {
 public:
  explicit Basis(int degree) : Basis(degree, degree + 2) {}

  Basis(int degree, int quad_points) : k_(degree) {
    if (degree < 0) throw InvalidArgument("polynomial degree must be nonnegative");
    if (quad_points < degree + 1) throw InvalidArgument("quadrature needs at least k + 1 points");
    quad_ = gauss_legendre(quad_points);
    const auto nq = quad_.size();
    phi_.resize(nq);
    dphi_.resize(nq);
    for (std::size_t q = 0; q < nq; ++q) legendre_all(k_, quad_.points[q], phi_[q], dphi_[q]);
    left_.resize(size());
    right_.resize(size());
    for (std::size_t j = 0; j < size(); ++j) {
      right_[j] = 1.0;
      left_[j] = (j % 2 == 0) ? 1.0 : -1.0;
    }
  }

  int degree() const { return k_; }
  std::size_t size() const { return static_cast<std::size_t>(k_) + 1; }
  const QuadratureRule& quadrature() const { return quad_; }

  /// phi_j at quadrature point q.
  double phi(std::size_t q, std::size_t j) const { return phi_[q][j]; }
  /// d phi_j / d xi at quadrature point q.
  double dphi(std::size_t q, std::size_t j) const { return dphi_[q][j]; }

  double at_left(std::size_t j) const { return left_[j]; }
  double at_right(std::size_t j) const { return right_[j]; }

  /// Integral of phi_j^2 over the reference interval.
  double norm2(std::size_t j) const { return 2.0 / (2.0 * static_cast<double>(j) + 1.0); }

  std::vector<double> values(double xi) const {
    std::vector<double> p, dp;
    legendre_all(k_, xi, p, dp);
    return p;
  }

  /// Evaluates the expansion with coefficients c at reference point xi.
  template <class Coeffs>
  double evaluate(const Coeffs& c, double xi) const {
    std::vector<double> p, dp;
    legendre_all(k_, xi, p, dp);
    double v = 0.0;
    for (std::size_t j = 0; j < size(); ++j) v += c[j] * p[j];
    return v;
  }

 private:
  int k_;
  QuadratureRule quad_;
  std::vector<std::vector<double>> phi_, dphi_;
  std::vector<double> left_, right_;
};

}  // namespace hdgnet
