#pragma once

// Directed pipe network: data model, vertex classification and the
// structural checks every downstream stage relies on.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hdgnet/errors.hpp"
#include "hdgnet/polynomial.hpp"

namespace hdgnet {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;

/// Pipe segment identified with the interval [0, length]; x = 0 sits at the
/// tail vertex. `flow` is signed relative to the tail -> head orientation.
struct Edge {
  std::string id;
  VertexIndex tail = 0;
  VertexIndex head = 0;
  double length = 1.0;
  double area = 1.0;
  double flow = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Inflow concentration g(t), stored as a polynomial in t.
class BoundarySignal {
 public:
  BoundarySignal() = default;
  explicit BoundarySignal(Polynomial p) : poly_(std::move(p)) {}

  static BoundarySignal zero() { return named("zero", Polynomial{}); }
  static BoundarySignal quadratic25() { return named("quadratic25", Polynomial({0.0, 0.0, 1.0 / 25.0})); }

  /// Builtin lookup; accepts "zero", "quadratic" and "quadratic25".
  static std::optional<BoundarySignal> builtin(const std::string& name) {
    if (name == "zero") return zero();
    if (name == "quadratic" || name == "quadratic25") return quadratic25();
    return std::nullopt;
  }

  double operator()(double t) const { return poly_(t); }
  const Polynomial& polynomial() const { return poly_; }
  /// Empty for signals given by explicit coefficients.
  const std::string& builtin_name() const { return builtin_; }

  friend bool operator==(const BoundarySignal&, const BoundarySignal&) = default;

 private:
  static BoundarySignal named(std::string name, Polynomial p) {
    BoundarySignal s(std::move(p));
    s.builtin_ = std::move(name);
    return s;
  }

  Polynomial poly_;
  std::string builtin_;
};

struct Network {
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::map<VertexIndex, BoundarySignal> inflow;
  /// Initial concentration per edge as a polynomial in the edge coordinate.
  std::vector<Polynomial> initial;
  double a0 = 1e-6;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_edges() const { return edges.size(); }

  const Polynomial& initial_on(EdgeIndex e) const {
    static const Polynomial zero;
    return e < initial.size() ? initial[e] : zero;
  }

  std::optional<VertexIndex> find_vertex(const std::string& name) const {
    auto it = std::find(vertices.begin(), vertices.end(), name);
    if (it == vertices.end()) return std::nullopt;
    return static_cast<VertexIndex>(it - vertices.begin());
  }

  std::optional<EdgeIndex> find_edge(const std::string& id) const {
    for (EdgeIndex e = 0; e < edges.size(); ++e)
      if (edges[e].id == id) return e;
    return std::nullopt;
  }

  friend bool operator==(const Network&, const Network&) = default;
};

/// n^e(v): -1 at the tail, +1 at the head, 0 if v is not an endpoint of e.
inline int incidence(const Edge& e, VertexIndex v) {
  if (v == e.tail) return -1;
  if (v == e.head) return 1;
  return 0;
}

/// Coordinate of vertex v on edge e (0 at the tail, length at the head).
inline double coordinate_of(const Edge& e, VertexIndex v) { return v == e.head ? e.length : 0.0; }

enum class VertexKind { junction, inflow_boundary, outflow_boundary, isolated };

inline const char* to_string(VertexKind k) {
  switch (k) {
    case VertexKind::junction: return "junction";
    case VertexKind::inflow_boundary: return "inflow";
    case VertexKind::outflow_boundary: return "outflow";
    case VertexKind::isolated: return "isolated";
  }
  return "?";
}

struct VertexInfo {
  VertexKind kind = VertexKind::isolated;
  std::vector<EdgeIndex> edges;      // E(v)
  std::vector<EdgeIndex> in_edges;   // b n > 0: edges delivering flow into v
  std::vector<EdgeIndex> out_edges;  // b n < 0: edges carrying flow away from v
  /// sum over in_edges of b^e n^e(v); strictly positive at valid junctions.
  double inflow_weight = 0.0;
};

struct VertexClassification {
  std::vector<VertexInfo> vertices;

  const VertexInfo& operator[](VertexIndex v) const { return vertices[v]; }
  std::size_t size() const { return vertices.size(); }

  std::vector<VertexIndex> of_kind(VertexKind k) const {
    std::vector<VertexIndex> out;
    for (VertexIndex v = 0; v < vertices.size(); ++v)
      if (vertices[v].kind == k) out.push_back(v);
    return out;
  }
};

/// Incidences, in/out edge sets and vertex kinds. Requires edge endpoints to
/// be valid vertex indices; otherwise throws InvalidArgument.
inline VertexClassification classify(const Network& net) {
  VertexClassification c;
  c.vertices.resize(net.num_vertices());
  for (EdgeIndex e = 0; e < net.num_edges(); ++e) {
    const Edge& edge = net.edges[e];
    if (edge.tail >= net.num_vertices() || edge.head >= net.num_vertices())
      throw InvalidArgument("edge '" + edge.id + "' references an unknown vertex");
    for (VertexIndex v : {edge.tail, edge.head}) {
      auto& info = c.vertices[v];
      if (!info.edges.empty() && info.edges.back() == e) continue;  // self loop
      info.edges.push_back(e);
      const double bn = edge.flow * incidence(edge, v);
      if (bn > 0) {
        info.in_edges.push_back(e);
        info.inflow_weight += bn;
      } else if (bn < 0) {
        info.out_edges.push_back(e);
      }
    }
  }
  for (auto& info : c.vertices) {
    if (info.edges.size() >= 2)
      info.kind = VertexKind::junction;
    else if (info.edges.size() == 1)
      info.kind = info.in_edges.empty() ? VertexKind::inflow_boundary : VertexKind::outflow_boundary;
    else
      info.kind = VertexKind::isolated;
  }
  return c;
}

struct ValidationFailure {
  std::string check;     // e.g. "condition_C", "zero_flow"
  std::string location;  // vertex or edge id, empty for global checks
  std::string message;
  double defect = 0.0;
};

struct ValidationReport {
  std::vector<ValidationFailure> failures;
  std::size_t junctions_checked = 0;
  double condition_tolerance = 0.0;

  bool ok() const { return failures.empty(); }

  const ValidationFailure* find(const std::string& check) const {
    for (const auto& f : failures)
      if (f.check == check) return &f;
    return nullptr;
  }
};

/// Tolerance for the junction flow balance, 1e-12 * max |b^e|.
inline double condition_tolerance(const Network& net) {
  double bmax = 0.0;
  for (const auto& e : net.edges) bmax = std::max(bmax, std::abs(e.flow));
  return 1e-12 * bmax;
}

/// Runs every structural check and collects all violations.
inline ValidationReport validate(const Network& net) {
  ValidationReport r;
  auto fail = [&](std::string check, std::string loc, std::string msg, double defect = 0.0) {
    r.failures.push_back({std::move(check), std::move(loc), std::move(msg), defect});
  };

  if (net.vertices.empty()) fail("empty", "", "network has no vertices");
  if (net.edges.empty()) fail("empty", "", "network has no edges");
  if (!(net.a0 > 0.0)) fail("area_bound", "", "a0 must be positive", net.a0);

  bool endpoints_ok = true;
  for (const auto& e : net.edges) {
    if (e.tail >= net.num_vertices() || e.head >= net.num_vertices()) {
      fail("structure", e.id, "edge references an unknown vertex");
      endpoints_ok = false;
      continue;
    }
    if (e.tail == e.head) {
      fail("structure", e.id, "self loop");
      endpoints_ok = false;
    }
  }
  for (const auto& e : net.edges) {
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      fail("length", e.id, "edge length must be positive", e.length);
    if (!(e.area >= net.a0) || !std::isfinite(e.area))
      fail("area_bound", e.id, "cross-section below a0", e.area);
    if (e.flow == 0.0)
      fail("zero_flow", e.id, "zero flow rate");
    else if (!std::isfinite(e.flow))
      fail("zero_flow", e.id, "non-finite flow rate", e.flow);
  }
  if (net.initial.size() > net.num_edges()) fail("structure", "", "initial data for more edges than exist");
  if (!endpoints_ok || net.vertices.empty()) return r;

  // connectivity via union-find
  std::vector<std::size_t> parent(net.num_vertices());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto root = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& e : net.edges) parent[root(e.tail)] = root(e.head);
  for (VertexIndex v = 0; v < net.num_vertices(); ++v)
    if (root(v) != root(0)) fail("connectivity", net.vertices[v], "vertex not connected to '" + net.vertices[0] + "'");

  const auto cls = classify(net);
  r.condition_tolerance = condition_tolerance(net);
  for (VertexIndex v = 0; v < net.num_vertices(); ++v) {
    const auto& info = cls[v];
    const auto& name = net.vertices[v];
    if (info.kind == VertexKind::junction) {
      ++r.junctions_checked;
      double sum = 0.0;
      for (EdgeIndex e : info.edges) sum += net.edges[e].flow * incidence(net.edges[e], v);
      if (std::abs(sum) > r.condition_tolerance) {
        std::ostringstream msg;
        msg << "flow balance violated: sum of b n = " << sum;
        fail("condition_C", name, msg.str(), sum);
      }
    }
    const bool has_signal = net.inflow.count(v) > 0;
    if (info.kind == VertexKind::inflow_boundary && !has_signal)
      fail("boundary_data", name, "inflow vertex without boundary signal");
    if (info.kind != VertexKind::inflow_boundary && has_signal)
      fail("boundary_data", name, "boundary signal on a vertex that is not an inflow boundary");
  }
  for (const auto& [v, sig] : net.inflow)
    if (v >= net.num_vertices()) fail("boundary_data", "", "boundary signal on unknown vertex");
  return r;
}

struct CompatibilityEntry {
  VertexIndex vertex = 0;
  double mixing_value = 0.0;  // û^v(0)
  double defect = 0.0;        // max over outgoing edges |u0^e(v) - û^v(0)|
};

struct CompatibilityReport {
  std::vector<CompatibilityEntry> entries;
  double tolerance = 1e-12;

  double max_defect() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.defect);
    return m;
  }
  bool compatible() const { return max_defect() <= tolerance; }
};

/// Checks that the initial data satisfies the coupling conditions at t = 0.
/// Advisory only; requires a valid network.
inline CompatibilityReport check_compatibility(const Network& net, double tolerance = 1e-12) {
  const auto cls = classify(net);
  CompatibilityReport rep;
  rep.tolerance = tolerance;
  auto trace = [&](EdgeIndex e, VertexIndex v) {
    return net.initial_on(e)(coordinate_of(net.edges[e], v));
  };
  for (VertexIndex v = 0; v < net.num_vertices(); ++v) {
    const auto& info = cls[v];
    CompatibilityEntry entry{v, 0.0, 0.0};
    if (info.kind == VertexKind::inflow_boundary) {
      auto it = net.inflow.find(v);
      entry.mixing_value = it != net.inflow.end() ? it->second(0.0) : 0.0;
    } else if (info.inflow_weight > 0.0) {
      double s = 0.0;
      for (EdgeIndex e : info.in_edges) s += net.edges[e].flow * incidence(net.edges[e], v) * trace(e, v);
      entry.mixing_value = s / info.inflow_weight;
    }
    for (EdgeIndex e : info.out_edges)
      entry.defect = std::max(entry.defect, std::abs(trace(e, v) - entry.mixing_value));
    rep.entries.push_back(entry);
  }
  return rep;
}

}  // namespace hdgnet
