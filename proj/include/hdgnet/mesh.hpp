#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hdgnet/errors.hpp"
#include "hdgnet/network.hpp"

namespace hdgnet {

using ElementIndex = std::size_t;

enum class Side { left, right };

/// Per-edge partitions 0 = x_0 < x_1 < ... < x_M = length. Elements are
/// numbered globally edge by edge, left to right within an edge.
class Mesh {
 public:
  struct ElementRef {
    EdgeIndex edge;
    std::size_t local;  // 0-based position within the edge
  };

  Mesh() = default;

  explicit Mesh(std::vector<std::vector<double>> breakpoints) : breakpoints_(std::move(breakpoints)) {
    offsets_.reserve(breakpoints_.size() + 1);
    offsets_.push_back(0);
    for (EdgeIndex e = 0; e < breakpoints_.size(); ++e) {
      const auto& x = breakpoints_[e];
      if (x.size() < 2) throw InvalidArgument("mesh: every edge needs at least one element");
      if (x.front() != 0.0) throw InvalidArgument("mesh: breakpoints must start at 0");
      for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) throw InvalidArgument("mesh: breakpoints must be strictly increasing");
        h_ = std::max(h_, x[i] - x[i - 1]);
        elements_.push_back({e, i - 1});
      }
      offsets_.push_back(elements_.size());
    }
  }

  std::size_t num_edges() const { return breakpoints_.size(); }
  std::size_t num_elements() const { return elements_.size(); }
  /// M^e
  std::size_t elements_on(EdgeIndex e) const { return breakpoints_[e].size() - 1; }
  const std::vector<double>& breakpoints(EdgeIndex e) const { return breakpoints_[e]; }
  double h() const { return h_; }

  ElementIndex element(EdgeIndex e, std::size_t local) const { return offsets_[e] + local; }
  ElementIndex first_element(EdgeIndex e) const { return offsets_[e]; }
  ElementIndex last_element(EdgeIndex e) const { return offsets_[e + 1] - 1; }
  const ElementRef& ref(ElementIndex el) const { return elements_[el]; }

  double left(ElementIndex el) const { return breakpoints_[elements_[el].edge][elements_[el].local]; }
  double right(ElementIndex el) const { return breakpoints_[elements_[el].edge][elements_[el].local + 1]; }
  double size(ElementIndex el) const { return right(el) - left(el); }

  /// Maps reference coordinate xi in [-1, 1] to the edge coordinate.
  double to_edge(ElementIndex el, double xi) const { return left(el) + 0.5 * (xi + 1.0) * size(el); }

 private:
  std::vector<std::vector<double>> breakpoints_;
  std::vector<std::size_t> offsets_;
  std::vector<ElementRef> elements_;
  double h_ = 0.0;
};

/// Uniform partition of every edge into the given number of elements.
inline Mesh build_mesh(const Network& net, const std::vector<std::size_t>& counts) {
  if (counts.size() != net.num_edges()) throw InvalidArgument("build_mesh: one element count per edge required");
  std::vector<std::vector<double>> bp(net.num_edges());
  for (EdgeIndex e = 0; e < net.num_edges(); ++e) {
    const auto m = counts[e];
    if (m < 1) throw InvalidArgument("build_mesh: element counts must be at least 1");
    const double len = net.edges[e].length;
    bp[e].resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) bp[e][i] = len * static_cast<double>(i) / static_cast<double>(m);
    bp[e][m] = len;
  }
  return Mesh(std::move(bp));
}

/// Uniform partition with M^e = ceil(length / target_h) elements per edge.
inline Mesh build_mesh(const Network& net, double target_h) {
  if (!(target_h > 0.0) || !std::isfinite(target_h)) throw InvalidArgument("build_mesh: target h must be positive");
  std::vector<std::size_t> counts;
  counts.reserve(net.num_edges());
  for (const auto& e : net.edges) {
    const double ratio = e.length / target_h;
    // absorb round-off so that e.g. 1 / 2^-k gives exactly 2^k elements
    const double m = std::ceil(ratio * (1.0 - 1e-14));
    counts.push_back(static_cast<std::size_t>(std::max(1.0, m)));
  }
  return build_mesh(net, counts);
}

/// Global numbering of the hybrid unknowns: one index per vertex (shared by
/// all incident edges), followed by the interior grid points edge by edge.
class HybridIndexMap {
 public:
  HybridIndexMap() = default;

  HybridIndexMap(const Network& net, const Mesh& mesh, const VertexClassification& cls)
      : num_vertices_(net.num_vertices()) {
    if (mesh.num_edges() != net.num_edges()) throw InvalidArgument("hybrid map: mesh does not match network");
    std::size_t next = num_vertices_;
    for (EdgeIndex e = 0; e < net.num_edges(); ++e) {
      interior_offset_.push_back(next);
      next += mesh.elements_on(e) - 1;
      tail_.push_back(net.edges[e].tail);
      head_.push_back(net.edges[e].head);
      count_.push_back(mesh.elements_on(e));
    }
    size_ = next;
    inflow_.assign(size_, false);
    for (VertexIndex v = 0; v < num_vertices_; ++v)
      inflow_[v] = cls[v].kind == VertexKind::inflow_boundary;
  }

  std::size_t size() const { return size_; }
  std::size_t num_vertices() const { return num_vertices_; }

  /// Index of grid point i (0..M^e) on edge e.
  std::size_t grid_point(EdgeIndex e, std::size_t i) const {
    if (i == 0) return tail_[e];
    if (i == count_[e]) return head_[e];
    return interior_offset_[e] + i - 1;
  }

  std::size_t element_endpoint(const Mesh& mesh, ElementIndex el, Side side) const {
    const auto& r = mesh.ref(el);
    return grid_point(r.edge, side == Side::left ? r.local : r.local + 1);
  }

  bool is_vertex(std::size_t idx) const { return idx < num_vertices_; }
  /// True for indices constrained by inflow data (complement of the test space).
  bool is_inflow(std::size_t idx) const { return inflow_[idx]; }

 private:
  std::size_t num_vertices_ = 0;
  std::size_t size_ = 0;
  std::vector<std::size_t> interior_offset_, tail_, head_, count_;
  std::vector<bool> inflow_;
};

inline HybridIndexMap build_hybrid_map(const Network& net, const Mesh& mesh) {
  return HybridIndexMap(net, mesh, classify(net));
}

}  // namespace hdgnet
