#pragma once

// Elementwise projections and interpolation onto P_k in Legendre coefficients.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hdgnet/basis.hpp"
#include "hdgnet/mesh.hpp"
#include "hdgnet/network.hpp"

namespace hdgnet {

/// Scalar function of the edge coordinate.
using LocalFunction = std::function<double(double)>;
/// Scalar function on the network: (edge, edge coordinate).
using NetworkFunction = std::function<double(EdgeIndex, double)>;

/// L2 projection of f on [left, right] onto P_k, using the given rule.
inline std::vector<double> l2_project_element(const LocalFunction& f, double left, double right,
                                              const Basis& basis, const QuadratureRule& rule) {
  std::vector<double> c(basis.size(), 0.0);
  const double h = right - left;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double xi = rule.points[q];
    const double fx = f(left + 0.5 * (xi + 1.0) * h);
    const auto p = basis.values(xi);
    for (std::size_t j = 0; j < c.size(); ++j) c[j] += rule.weights[q] * fx * p[j];
  }
  for (std::size_t j = 0; j < c.size(); ++j) c[j] /= basis.norm2(j);
  return c;
}

/// Projection matching f at the outflow endpoint (right if flow > 0, left
/// otherwise) with the error orthogonal to P_{k-1}.
inline std::vector<double> special_projection(const LocalFunction& f, double left, double right,
                                              const Basis& basis, double flow, const QuadratureRule& rule) {
  const std::size_t k = static_cast<std::size_t>(basis.degree());
  std::vector<double> c(basis.size(), 0.0);
  if (k > 0) {
    const auto moments = l2_project_element(f, left, right, basis, rule);
    std::copy(moments.begin(), moments.begin() + static_cast<std::ptrdiff_t>(k), c.begin());
  }
  const bool out_right = flow > 0;
  const double target = f(out_right ? right : left);
  double partial = 0.0;
  for (std::size_t j = 0; j < k; ++j) partial += c[j] * (out_right ? basis.at_right(j) : basis.at_left(j));
  c[k] = (target - partial) / (out_right ? basis.at_right(k) : basis.at_left(k));
  return c;
}

/// Nodal interpolation onto P_k: element midpoint for k = 0, Gauss-Lobatto
/// nodes (which include both endpoints) for k >= 1.
class NodalInterpolator {
 public:
  explicit NodalInterpolator(const Basis& basis) : basis_(&basis) {
    const int k = basis.degree();
    nodes_ = k == 0 ? std::vector<double>{0.0} : gauss_lobatto_nodes(k + 1);
    const auto n = static_cast<Eigen::Index>(nodes_.size());
    Eigen::MatrixXd v(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto p = basis.values(nodes_[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < n; ++j) v(i, j) = p[static_cast<std::size_t>(j)];
    }
    inverse_ = v.inverse();
  }

  const std::vector<double>& nodes() const { return nodes_; }

  /// Legendre coefficients of the interpolant from values at nodes().
  std::vector<double> from_values(const std::vector<double>& values) const {
    const auto n = static_cast<Eigen::Index>(nodes_.size());
    std::vector<double> c(nodes_.size(), 0.0);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        c[static_cast<std::size_t>(i)] += inverse_(i, j) * values[static_cast<std::size_t>(j)];
    return c;
  }

  std::vector<double> interpolate(const LocalFunction& f, double left, double right) const {
    std::vector<double> vals(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) vals[i] = f(left + 0.5 * (nodes_[i] + 1.0) * (right - left));
    return from_values(vals);
  }

 private:
  const Basis* basis_;
  std::vector<double> nodes_;
  Eigen::MatrixXd inverse_;
};

/// Gauss rule with enough points for integrating a degree-`degree` integrand.
inline QuadratureRule rule_for_degree(int degree) { return gauss_legendre(std::max(1, degree / 2 + 1)); }

/// Global coefficient vector (element-major, k + 1 entries per element) of
/// the elementwise L2 projection of f.
inline Eigen::VectorXd l2_project(const NetworkFunction& f, const Mesh& mesh, const Basis& basis,
                                  const QuadratureRule& rule) {
  const auto nb = basis.size();
  Eigen::VectorXd out(static_cast<Eigen::Index>(mesh.num_elements() * nb));
  for (ElementIndex el = 0; el < mesh.num_elements(); ++el) {
    const auto edge = mesh.ref(el).edge;
    const auto c = l2_project_element([&](double x) { return f(edge, x); }, mesh.left(el), mesh.right(el), basis, rule);
    for (std::size_t j = 0; j < nb; ++j) out(static_cast<Eigen::Index>(el * nb + j)) = c[j];
  }
  return out;
}

/// Elementwise L2 projection of the network's initial data; exact for
/// polynomial data (the rule is sized from the data degree).
inline Eigen::VectorXd l2_project_initial(const Network& net, const Mesh& mesh, const Basis& basis) {
  int deg = 0;
  for (EdgeIndex e = 0; e < net.num_edges(); ++e) deg = std::max(deg, net.initial_on(e).degree());
  const auto rule = rule_for_degree(deg + basis.degree());
  return l2_project([&](EdgeIndex e, double x) { return net.initial_on(e)(x); }, mesh, basis, rule);
}

inline Eigen::VectorXd interpolate(const NetworkFunction& f, const Mesh& mesh, const Basis& basis) {
  const NodalInterpolator interp(basis);
  const auto nb = basis.size();
  Eigen::VectorXd out(static_cast<Eigen::Index>(mesh.num_elements() * nb));
  for (ElementIndex el = 0; el < mesh.num_elements(); ++el) {
    const auto edge = mesh.ref(el).edge;
    const auto c = interp.interpolate([&](double x) { return f(edge, x); }, mesh.left(el), mesh.right(el));
    for (std::size_t j = 0; j < nb; ++j) out(static_cast<Eigen::Index>(el * nb + j)) = c[j];
  }
  return out;
}

}  // namespace hdgnet
