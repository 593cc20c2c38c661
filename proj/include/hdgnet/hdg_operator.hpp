#pragma once

// Hybrid DG semi-discretization on a network: hybrid reconstruction,
// direct evaluation of the bilinear form, assembly of the eliminated ODE
// system M u' + B u = G g(t), and the balance diagnostics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hdgnet/basis.hpp"
#include "hdgnet/errors.hpp"
#include "hdgnet/mesh.hpp"
#include "hdgnet/network.hpp"

namespace hdgnet {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Element trace contributing to a hybrid value.
struct TraceSource {
  ElementIndex element;
  Side side;
  double weight;
};

/// û_p = sum_i weight_i * trace_i + g^v(t) if `signal` is set.
struct HybridRule {
  std::vector<TraceSource> sources;
  std::optional<VertexIndex> signal;
};

/// Upwind rules for every hybrid index: inflow data at inflow vertices,
/// flux-weighted mixture of incoming traces at junctions and outflow
/// vertices, the upwind element trace at interior grid points.
inline std::vector<HybridRule> hybrid_rules(const Network& net, const VertexClassification& cls, const Mesh& mesh,
                                            const HybridIndexMap& map) {
  std::vector<HybridRule> rules(map.size());
  for (VertexIndex v = 0; v < net.num_vertices(); ++v) {
    const auto& info = cls[v];
    if (info.kind == VertexKind::inflow_boundary) {
      rules[v].signal = v;
      continue;
    }
    if (info.kind == VertexKind::isolated) continue;
    if (!(info.inflow_weight > 0.0))
      throw InvalidArgument("vertex '" + net.vertices[v] + "' has no incoming flow; mixing value undefined");
    for (EdgeIndex e : info.in_edges) {
      const auto& edge = net.edges[e];
      const double w = edge.flow * incidence(edge, v) / info.inflow_weight;
      if (v == edge.head)
        rules[v].sources.push_back({mesh.last_element(e), Side::right, w});
      else
        rules[v].sources.push_back({mesh.first_element(e), Side::left, w});
    }
  }
  for (EdgeIndex e = 0; e < net.num_edges(); ++e) {
    const bool forward = net.edges[e].flow > 0;
    for (std::size_t i = 1; i < mesh.elements_on(e); ++i) {
      auto& r = rules[map.grid_point(e, i)];
      if (forward)
        r.sources.push_back({mesh.element(e, i - 1), Side::right, 1.0});
      else
        r.sources.push_back({mesh.element(e, i), Side::left, 1.0});
    }
  }
  return rules;
}

/// Network, mesh and basis bundled with everything derived from them.
class Discretization {
 public:
  Discretization(Network network, Mesh mesh, Basis basis)
      : net_(std::move(network)), mesh_(std::move(mesh)), basis_(std::move(basis)) {
    if (mesh_.num_edges() != net_.num_edges()) throw InvalidArgument("mesh does not match network");
    cls_ = classify(net_);
    map_ = HybridIndexMap(net_, mesh_, cls_);
    rules_ = hybrid_rules(net_, cls_, mesh_, map_);
  }

  const Network& network() const { return net_; }
  const Mesh& mesh() const { return mesh_; }
  const Basis& basis() const { return basis_; }
  const VertexClassification& classification() const { return cls_; }
  const HybridIndexMap& hybrid_map() const { return map_; }
  const std::vector<HybridRule>& rules() const { return rules_; }

  std::size_t block() const { return basis_.size(); }
  std::size_t num_dofs() const { return mesh_.num_elements() * block(); }
  Eigen::Index dof(ElementIndex el, std::size_t j) const { return static_cast<Eigen::Index>(el * block() + j); }

  /// Inflow data g^v(t) indexed by vertex, zero at all other vertices.
  Eigen::VectorXd boundary_values(double t) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net_.num_vertices()));
    for (const auto& [v, sig] : net_.inflow) g(static_cast<Eigen::Index>(v)) = sig(t);
    return g;
  }

  double trace(const Eigen::VectorXd& u, ElementIndex el, Side side) const {
    double s = 0.0;
    for (std::size_t j = 0; j < block(); ++j)
      s += u(dof(el, j)) * (side == Side::left ? basis_.at_left(j) : basis_.at_right(j));
    return s;
  }

  /// Value of the element polynomial at reference point xi.
  double value(const Eigen::VectorXd& u, ElementIndex el, double xi) const {
    const auto p = basis_.values(xi);
    double s = 0.0;
    for (std::size_t j = 0; j < block(); ++j) s += u(dof(el, j)) * p[j];
    return s;
  }

 private:
  Network net_;
  Mesh mesh_;
  Basis basis_;
  VertexClassification cls_;
  HybridIndexMap map_;
  std::vector<HybridRule> rules_;
};

/// Left and right trace of every element.
struct ElementTraces {
  std::vector<double> left, right;
  double at(ElementIndex el, Side s) const { return s == Side::left ? left[el] : right[el]; }
};

inline ElementTraces element_traces(const Discretization& d, const Eigen::VectorXd& u) {
  ElementTraces tr;
  const auto n = d.mesh().num_elements();
  tr.left.resize(n);
  tr.right.resize(n);
  for (ElementIndex el = 0; el < n; ++el) {
    tr.left[el] = d.trace(u, el, Side::left);
    tr.right[el] = d.trace(u, el, Side::right);
  }
  return tr;
}

/// Eliminated hybrid values from element traces and inflow data g (indexed
/// by vertex).
inline Eigen::VectorXd reconstruct_hybrid(const ElementTraces& traces, const Eigen::VectorXd& g,
                                          const std::vector<HybridRule>& rules) {
  Eigen::VectorXd uhat = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rules.size()));
  for (std::size_t p = 0; p < rules.size(); ++p) {
    double s = 0.0;
    for (const auto& src : rules[p].sources) s += src.weight * traces.at(src.element, src.side);
    if (rules[p].signal) s += g(static_cast<Eigen::Index>(*rules[p].signal));
    uhat(static_cast<Eigen::Index>(p)) = s;
  }
  return uhat;
}

inline Eigen::VectorXd reconstruct_hybrid(const Discretization& d, const Eigen::VectorXd& u, double t) {
  return reconstruct_hybrid(element_traces(d, u), d.boundary_values(t), d.rules());
}

/// b_h(u, uhat; w, what) evaluated term by term:
///   -(b u, w')_T + <b n u*, w - what>_dT + <b n uhat, what>_out,
/// with b n u* = max(bn, 0) u + min(bn, 0) uhat.
inline double apply_bilinear_form(const Discretization& d, const Eigen::VectorXd& u, const Eigen::VectorXd& uhat,
                                  const Eigen::VectorXd& w, const Eigen::VectorXd& what) {
  const auto& mesh = d.mesh();
  const auto& basis = d.basis();
  const auto& rule = basis.quadrature();
  const auto& map = d.hybrid_map();
  double total = 0.0;
  for (ElementIndex el = 0; el < mesh.num_elements(); ++el) {
    const double b = d.network().edges[mesh.ref(el).edge].flow;
    // (b u, dw/dx) over the element; the Jacobians h/2 and 2/h cancel
    double vol = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double uq = 0.0, dwq = 0.0;
      for (std::size_t j = 0; j < d.block(); ++j) {
        uq += u(d.dof(el, j)) * basis.phi(q, j);
        dwq += w(d.dof(el, j)) * basis.dphi(q, j);
      }
      vol += rule.weights[q] * uq * dwq;
    }
    total -= b * vol;
    for (Side s : {Side::left, Side::right}) {
      const double bn = b * (s == Side::left ? -1.0 : 1.0);
      const auto p = static_cast<Eigen::Index>(map.element_endpoint(mesh, el, s));
      const double ustar_bn = std::max(bn, 0.0) * d.trace(u, el, s) + std::min(bn, 0.0) * uhat(p);
      total += ustar_bn * (d.trace(w, el, s) - what(p));
    }
  }
  for (VertexIndex v : d.classification().of_kind(VertexKind::outflow_boundary)) {
    const auto& edge = d.network().edges[d.classification()[v].edges.front()];
    const double bn = edge.flow * incidence(edge, v);
    total += bn * uhat(static_cast<Eigen::Index>(v)) * what(static_cast<Eigen::Index>(v));
  }
  return total;
}

/// Semi-discrete system M u' + B u = G g(t) after eliminating the hybrid
/// variable; uhat = R u + Rg g.
struct OdeSystem {
  SparseMatrix mass;            // M, diagonal for the Legendre basis
  Eigen::VectorXd mass_diag;    // diagonal of M
  SparseMatrix flux;            // B
  SparseMatrix input;           // G: |V| columns, nonzero only for inflow vertices
  SparseMatrix reconstruction;  // R
  SparseMatrix reconstruction_input;  // Rg

  Eigen::Index size() const { return flux.rows(); }

  /// u' = M^{-1} (G g - B u)
  Eigen::VectorXd rhs(const Eigen::VectorXd& u, const Eigen::VectorXd& g) const {
    if (u.size() != size() || g.size() != input.cols()) throw InvalidArgument("OdeSystem::rhs: dimension mismatch");
    Eigen::VectorXd r = input * g - flux * u;
    return r.cwiseQuotient(mass_diag);
  }

  Eigen::VectorXd hybrid(const Eigen::VectorXd& u, const Eigen::VectorXd& g) const {
    return reconstruction * u + reconstruction_input * g;
  }
};

inline OdeSystem assemble(const Discretization& d) {
  const auto& mesh = d.mesh();
  const auto& basis = d.basis();
  const auto& rule = basis.quadrature();
  const auto& map = d.hybrid_map();
  const auto& rules = d.rules();
  const auto nb = d.block();
  const auto n = static_cast<Eigen::Index>(d.num_dofs());
  const auto nv = static_cast<Eigen::Index>(d.network().num_vertices());

  auto endpoint_value = [&](std::size_t j, Side s) { return s == Side::left ? basis.at_left(j) : basis.at_right(j); };

  std::vector<Eigen::Triplet<double>> mt, bt, gt, rt, rgt;
  OdeSystem sys;
  sys.mass_diag.resize(n);
  for (ElementIndex el = 0; el < mesh.num_elements(); ++el) {
    const auto& edge = d.network().edges[mesh.ref(el).edge];
    const double h = mesh.size(el);
    for (std::size_t i = 0; i < nb; ++i) {
      const double m = edge.area * 0.5 * h * basis.norm2(i);
      mt.emplace_back(d.dof(el, i), d.dof(el, i), m);
      sys.mass_diag(d.dof(el, i)) = m;
      for (std::size_t j = 0; j < nb; ++j) {
        double vol = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) vol += rule.weights[q] * basis.phi(q, j) * basis.dphi(q, i);
        if (vol != 0.0) bt.emplace_back(d.dof(el, i), d.dof(el, j), -edge.flow * vol);
      }
    }
    for (Side s : {Side::left, Side::right}) {
      const double bn = edge.flow * (s == Side::left ? -1.0 : 1.0);
      if (bn > 0) {
        for (std::size_t i = 0; i < nb; ++i)
          for (std::size_t j = 0; j < nb; ++j)
            bt.emplace_back(d.dof(el, i), d.dof(el, j), bn * endpoint_value(j, s) * endpoint_value(i, s));
        continue;
      }
      const auto& r = rules[map.element_endpoint(mesh, el, s)];
      for (const auto& src : r.sources)
        for (std::size_t i = 0; i < nb; ++i)
          for (std::size_t j = 0; j < nb; ++j)
            bt.emplace_back(d.dof(el, i), d.dof(src.element, j),
                            bn * src.weight * endpoint_value(j, src.side) * endpoint_value(i, s));
      if (r.signal)
        for (std::size_t i = 0; i < nb; ++i)
          gt.emplace_back(d.dof(el, i), static_cast<Eigen::Index>(*r.signal), -bn * endpoint_value(i, s));
    }
  }
  for (std::size_t p = 0; p < rules.size(); ++p) {
    const auto row = static_cast<Eigen::Index>(p);
    for (const auto& src : rules[p].sources)
      for (std::size_t j = 0; j < nb; ++j)
        rt.emplace_back(row, d.dof(src.element, j), src.weight * endpoint_value(j, src.side));
    if (rules[p].signal) rgt.emplace_back(row, static_cast<Eigen::Index>(*rules[p].signal), 1.0);
  }

  const auto nh = static_cast<Eigen::Index>(map.size());
  sys.mass.resize(n, n);
  sys.mass.setFromTriplets(mt.begin(), mt.end());
  sys.flux.resize(n, n);
  sys.flux.setFromTriplets(bt.begin(), bt.end());
  sys.flux.prune(0.0);
  sys.input.resize(n, nv);
  sys.input.setFromTriplets(gt.begin(), gt.end());
  sys.reconstruction.resize(nh, n);
  sys.reconstruction.setFromTriplets(rt.begin(), rt.end());
  sys.reconstruction_input.resize(nh, nv);
  sys.reconstruction_input.setFromTriplets(rgt.begin(), rgt.end());
  return sys;
}

/// Element coefficients u, hybrid values uhat and time t.
struct State {
  Eigen::VectorXd u;
  Eigen::VectorXd uhat;
  double t = 0.0;
};

inline State make_state(const Discretization& d, Eigen::VectorXd u, double t) {
  if (u.size() != static_cast<Eigen::Index>(d.num_dofs())) throw InvalidArgument("make_state: dimension mismatch");
  State s;
  s.uhat = reconstruct_hybrid(d, u, t);
  s.u = std::move(u);
  s.t = t;
  return s;
}

struct BoundaryFlux {
  VertexIndex vertex;
  double value;  // b^e n^e(v) times the trace used at v
};

struct Diagnostics {
  double t = 0.0;
  double mass = 0.0;                 // int a u
  double energy = 0.0;               // ||a^{1/2} u||^2
  double jump_dissipation = 0.0;     // | |b|^{1/2} (u - uhat) |^2 over element endpoints
  double outflow_dissipation = 0.0;  // | |b|^{1/2} uhat |^2 over outflow vertices
  double inflow_power = 0.0;         // | |b|^{1/2} g |^2 over inflow vertices
  std::vector<BoundaryFlux> boundary_fluxes;

  double net_boundary_flux() const {
    double s = 0.0;
    for (const auto& f : boundary_fluxes) s += f.value;
    return s;
  }
};

inline Diagnostics compute_diagnostics(const Discretization& d, const State& st) {
  const auto& mesh = d.mesh();
  const auto& net = d.network();
  const auto& map = d.hybrid_map();
  if (st.u.size() != static_cast<Eigen::Index>(d.num_dofs()) || st.uhat.size() != static_cast<Eigen::Index>(map.size()))
    throw InvalidArgument("compute_diagnostics: state does not conform to the discretization");
  Diagnostics diag;
  diag.t = st.t;
  for (ElementIndex el = 0; el < mesh.num_elements(); ++el) {
    const auto& edge = net.edges[mesh.ref(el).edge];
    const double h = mesh.size(el);
    diag.mass += edge.area * h * st.u(d.dof(el, 0));
    for (std::size_t j = 0; j < d.block(); ++j) {
      const double c = st.u(d.dof(el, j));
      diag.energy += edge.area * 0.5 * h * d.basis().norm2(j) * c * c;
    }
    for (Side s : {Side::left, Side::right}) {
      const double jump = d.trace(st.u, el, s) - st.uhat(static_cast<Eigen::Index>(map.element_endpoint(mesh, el, s)));
      diag.jump_dissipation += std::abs(edge.flow) * jump * jump;
    }
  }
  const auto& cls = d.classification();
  for (VertexIndex v = 0; v < net.num_vertices(); ++v) {
    const auto& info = cls[v];
    if (info.kind != VertexKind::inflow_boundary && info.kind != VertexKind::outflow_boundary) continue;
    const EdgeIndex e = info.edges.front();
    const auto& edge = net.edges[e];
    const double bn = edge.flow * incidence(edge, v);
    if (info.kind == VertexKind::inflow_boundary) {
      auto it = net.inflow.find(v);
      const double g = it != net.inflow.end() ? it->second(st.t) : 0.0;
      diag.inflow_power += std::abs(bn) * g * g;
      diag.boundary_fluxes.push_back({v, bn * g});
    } else {
      const ElementIndex el = v == edge.head ? mesh.last_element(e) : mesh.first_element(e);
      const double tr = d.trace(st.u, el, v == edge.head ? Side::right : Side::left);
      const double uh = st.uhat(static_cast<Eigen::Index>(v));
      diag.outflow_dissipation += std::abs(bn) * uh * uh;
      diag.boundary_fluxes.push_back({v, bn * tr});
    }
  }
  return diag;
}

}  // namespace hdgnet
