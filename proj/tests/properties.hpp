#pragma once

// Residual checks for the structural properties of the scheme. Each returns
// the worst relative residual found; shared by unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "test_support.hpp"

namespace hdgnet::testing {

/// sum |b| (w - what)^2 over element endpoints
inline double jump_term(const Discretization& d, const Eigen::VectorXd& w, const Eigen::VectorXd& what) {
  const auto& mesh = d.mesh();
  double s = 0.0;
  for (ElementIndex el = 0; el < mesh.num_elements(); ++el) {
    const double b = std::abs(d.network().edges[mesh.ref(el).edge].flow);
    for (Side side : {Side::left, Side::right}) {
      const auto p = static_cast<Eigen::Index>(d.hybrid_map().element_endpoint(mesh, el, side));
      const double j = d.trace(w, el, side) - what(p);
      s += b * j * j;
    }
  }
  return s;
}

/// sum |b n| x_v^2 over vertices of the given kind
inline double boundary_term(const Discretization& d, VertexKind kind, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (VertexIndex v : d.classification().of_kind(kind)) {
    const auto& edge = d.network().edges[d.classification()[v].edges.front()];
    const double xv = x(static_cast<Eigen::Index>(v));
    s += std::abs(edge.flow) * xv * xv;
  }
  return s;
}

/// Random inflow data vector (indexed by vertex, zero elsewhere).
inline Eigen::VectorXd random_inflow(std::mt19937& rng, const Discretization& d) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.network().num_vertices()));
  std::normal_distribution<double> normal;
  for (VertexIndex v : d.classification().of_kind(VertexKind::inflow_boundary)) g(static_cast<Eigen::Index>(v)) = normal(rng);
  return g;
}

/// Random discretization of a random network: k <= 2, 1..3 elements per edge.
inline Discretization random_discretization(std::mt19937& rng, int max_degree = 2) {
  const auto net = random_network(rng);
  std::uniform_int_distribution<std::size_t> count(1, 3);
  std::vector<std::size_t> counts(net.num_edges());
  for (auto& c : counts) c = count(rng);
  const int k = std::uniform_int_distribution<int>(0, max_degree)(rng);
  return Discretization(net, build_mesh(net, counts), Basis(k));
}

/// 2 (a u', u) + jumps + outflow - inflow = 0 for the semi-discrete system.
inline double energy_identity_residual(const Discretization& d, const OdeSystem& sys, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& g) {
  const Eigen::VectorXd uhat = sys.hybrid(u, g);
  const Eigen::VectorXd du = sys.rhs(u, g);
  const double power = 2.0 * du.dot(sys.mass * u);
  const double jumps = jump_term(d, u, uhat);
  const double out = boundary_term(d, VertexKind::outflow_boundary, uhat);
  const double in = boundary_term(d, VertexKind::inflow_boundary, g);
  return relative_residual(power + jumps + out - in, {power, jumps, out, in});
}

/// b_h(w, what; w, what) = 1/2 sum |b| (w - what)^2 + 1/2 |b| what^2 at
/// outflow vertices, for what vanishing at inflow vertices.
inline double semi_ellipticity_residual(const Discretization& d, const Eigen::VectorXd& w, const Eigen::VectorXd& what) {
  const double lhs = apply_bilinear_form(d, w, what, w, what);
  const double rhs = 0.5 * jump_term(d, w, what) + 0.5 * boundary_term(d, VertexKind::outflow_boundary, what);
  return relative_residual(lhs - rhs, {lhs, rhs});
}

/// At every junction, sum over incident edges of b n times the upwind value
/// (element trace on incoming edges, û on outgoing ones) vanishes.
inline double junction_flux_residual(const Discretization& d, const Eigen::VectorXd& u, const Eigen::VectorXd& uhat) {
  const auto& net = d.network();
  const auto& mesh = d.mesh();
  double worst = 0.0;
  for (VertexIndex v : d.classification().of_kind(VertexKind::junction)) {
    double sum = 0.0, scale = 0.0;
    for (EdgeIndex e : d.classification()[v].edges) {
      const auto& edge = net.edges[e];
      const double bn = edge.flow * incidence(edge, v);
      const bool at_head = v == edge.head;
      const ElementIndex el = at_head ? mesh.last_element(e) : mesh.first_element(e);
      const double value = bn > 0 ? d.trace(u, el, at_head ? Side::right : Side::left) : uhat(static_cast<Eigen::Index>(v));
      sum += bn * value;
      scale = std::max(scale, std::abs(bn * value));
    }
    worst = std::max(worst, std::abs(sum) / std::max(scale, 1e-300));
  }
  return worst;
}

/// d/dt int a u equals minus the net boundary flux, for the semi-discrete
/// system at state (u, g).
inline double semi_discrete_conservation_residual(const Discretization& d, const OdeSystem& sys,
                                                  const Eigen::VectorXd& u, const Eigen::VectorXd& g) {
  const Eigen::VectorXd du = sys.rhs(u, g);
  double rate = 0.0;
  for (ElementIndex el = 0; el < d.mesh().num_elements(); ++el)
    rate += d.network().edges[d.mesh().ref(el).edge].area * d.mesh().size(el) * du(d.dof(el, 0));
  double flux = 0.0, scale = std::abs(rate);
  for (VertexIndex v = 0; v < d.network().num_vertices(); ++v) {
    const auto& info = d.classification()[v];
    if (info.kind != VertexKind::inflow_boundary && info.kind != VertexKind::outflow_boundary) continue;
    const EdgeIndex e = info.edges.front();
    const auto& edge = d.network().edges[e];
    const double bn = edge.flow * incidence(edge, v);
    double value = g(static_cast<Eigen::Index>(v));
    if (info.kind == VertexKind::outflow_boundary) {
      const bool at_head = v == edge.head;
      value = d.trace(u, at_head ? d.mesh().last_element(e) : d.mesh().first_element(e),
                      at_head ? Side::right : Side::left);
    }
    flux += bn * value;
    scale = std::max(scale, std::abs(bn * value));
  }
  return std::abs(rate + flux) / std::max(scale, 1e-300);
}

/// Worst relative per-step mass-balance residual of a simulation:
///   |m^{n+1} - m^n + tau_n F(t_{n+1})| / max(|m^n|, |m^{n+1}|)
/// where F is the net outward boundary flux.
inline double mass_balance_residual(const TimeSeries& ts) {
  double worst = 0.0;
  for (std::size_t n = 1; n < ts.diagnostics.size(); ++n) {
    const auto& a = ts.diagnostics[n - 1];
    const auto& b = ts.diagnostics[n];
    const double tau = ts.times[n] - ts.times[n - 1];
    const double res = b.mass - a.mass + tau * b.net_boundary_flux();
    const double scale = std::max({std::abs(a.mass), std::abs(b.mass), tau * std::abs(b.net_boundary_flux())});
    if (scale > 0.0) worst = std::max(worst, std::abs(res) / scale);
  }
  return worst;
}

/// max_n max_i |u_i^n - c delta_{i0}| over `steps` implicit Euler steps
/// from the constant state c with inflow data c.
inline double constant_state_drift(const Network& base, double c, double h, int k, double tau, std::size_t steps) {
  Network net = base;
  net.initial.assign(net.num_edges(), Polynomial::constant(c));
  for (auto& [v, sig] : net.inflow) sig = BoundarySignal(Polynomial::constant(c));
  const Discretization d(net, build_mesh(net, h), Basis(k));
  StepperConfig cfg;
  cfg.tau = tau;
  cfg.final_time = tau * static_cast<double>(steps);
  double worst = 0.0;
  simulate(d, cfg, [&](std::size_t, const State& st) {
    for (ElementIndex el = 0; el < d.mesh().num_elements(); ++el)
      for (std::size_t j = 0; j < d.block(); ++j)
        worst = std::max(worst, std::abs(st.u(d.dof(el, j)) - (j == 0 ? c : 0.0)));
    for (Eigen::Index p = 0; p < st.uhat.size(); ++p) worst = std::max(worst, std::abs(st.uhat(p) - c));
  });
  return worst;
}

/// max over steps of |u_eliminated - u_coupled|, implicit Euler.
inline double elimination_mismatch(const Discretization& d, double tau, std::size_t steps) {
  const CoupledSystem coupled(d);
  const OdeSystem sys = assemble(d);
  ImplicitStepper stepper(d, sys);
  State st = make_state(d, l2_project_initial(d.network(), d.mesh(), d.basis()), 0.0);
  Eigen::VectorXd u = st.u;
  double worst = 0.0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t1 = static_cast<double>(n) * tau;
    st = stepper.step(st, tau, t1, n);
    u = coupled.step(u, tau, t1);
    worst = std::max(worst, (st.u - u).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace hdgnet::testing
