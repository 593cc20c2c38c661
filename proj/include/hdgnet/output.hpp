#pragma once

// CSV / JSON serialization of simulation and convergence results.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdgnet/basis.hpp"
#include "hdgnet/oracle.hpp"
#include "hdgnet/time_integration.hpp"

namespace hdgnet {

/// Shortest-stable fixed formatting: 17 significant digits.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct RunMetadata {
  std::string config_hash;
  int k = 1;
  double h = 1.0;
  double tau = 1.0;
  double final_time = 0.0;
  Scheme scheme = Scheme::implicit_euler;
  std::size_t steps = 0;
  std::size_t snapshot_every = 1;
};

inline nlohmann::json metadata_json(const RunMetadata& m, const Discretization& d) {
  return {{"config_hash", m.config_hash},
          {"k", m.k},
          {"h", m.h},
          {"tau", m.tau},
          {"T", m.final_time},
          {"scheme", to_string(m.scheme)},
          {"steps", m.steps},
          {"snapshot_every", m.snapshot_every},
          {"elements", d.mesh().num_elements()},
          {"hybrid_unknowns", d.hybrid_map().size()}};
}

/// Boundary vertices in index order; fixes the flux column order.
inline std::vector<VertexIndex> boundary_vertices(const Discretization& d) {
  std::vector<VertexIndex> out;
  for (VertexIndex v = 0; v < d.network().num_vertices(); ++v) {
    const auto k = d.classification()[v].kind;
    if (k == VertexKind::inflow_boundary || k == VertexKind::outflow_boundary) out.push_back(v);
  }
  return out;
}

inline void write_diagnostics_csv(std::ostream& os, const Discretization& d, const TimeSeries& ts) {
  const auto bverts = boundary_vertices(d);
  os << "t,mass,energy,jump_dissipation,outflow_dissipation,inflow_power";
  for (VertexIndex v : bverts) os << ",boundary_flux_" << d.network().vertices[v];
  os << '\n';
  for (const auto& diag : ts.diagnostics) {
    os << format_real(diag.t) << ',' << format_real(diag.mass) << ',' << format_real(diag.energy) << ','
       << format_real(diag.jump_dissipation) << ',' << format_real(diag.outflow_dissipation) << ','
       << format_real(diag.inflow_power);
    for (VertexIndex v : bverts) {
      double flux = 0.0;
      for (const auto& f : diag.boundary_fluxes)
        if (f.vertex == v) flux = f.value;
      os << ',' << format_real(flux);
    }
    os << '\n';
  }
}

/// Nodes at which snapshot values are sampled: Gauss-Lobatto points, at
/// least the two element endpoints.
inline std::vector<double> snapshot_nodes(const Basis& basis) {
  return gauss_lobatto_nodes(std::max(2, basis.degree() + 1));
}

inline void write_snapshots_csv(std::ostream& os, const Discretization& d, const TimeSeries& ts) {
  const auto& mesh = d.mesh();
  const auto& map = d.hybrid_map();
  const auto nodes = snapshot_nodes(d.basis());
  os << "t,edge,element,node_x,value,uhat_left,uhat_right\n";
  for (const auto& st : ts.snapshots) {
    for (ElementIndex el = 0; el < mesh.num_elements(); ++el) {
      const auto& ref = mesh.ref(el);
      const auto& edge_id = d.network().edges[ref.edge].id;
      const double ul = st.uhat(static_cast<Eigen::Index>(map.element_endpoint(mesh, el, Side::left)));
      const double ur = st.uhat(static_cast<Eigen::Index>(map.element_endpoint(mesh, el, Side::right)));
      for (double xi : nodes) {
        os << format_real(st.t) << ',' << edge_id << ',' << ref.local << ',' << format_real(mesh.to_edge(el, xi))
           << ',' << format_real(d.value(st.u, el, xi)) << ',' << format_real(ul) << ',' << format_real(ur) << '\n';
      }
    }
  }
}

inline void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep) {
  os << "level,h,tau,err,rate,steps\n";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    os << i << ',' << format_real(r.h) << ',' << format_real(r.tau) << ',' << format_real(r.err) << ','
       << (std::isnan(r.rate) ? std::string("---") : format_real(r.rate)) << ',' << r.steps << '\n';
  }
}

/// Human-readable (h, err, rate) table.
inline void print_convergence_table(std::ostream& os, const ConvergenceReport& rep) {
  char line[128];
  std::snprintf(line, sizeof line, "%-12s %-14s %-10s\n", "h", "err", "rate");
  os << line;
  for (const auto& r : rep.rows) {
    char rate[32];
    if (std::isnan(r.rate))
      std::snprintf(rate, sizeof rate, "---");
    else
      std::snprintf(rate, sizeof rate, "%.4f", r.rate);
    std::snprintf(line, sizeof line, "%-12.6g %-14.6e %-10s\n", r.h, r.err, rate);
    os << line;
  }
}

}  // namespace hdgnet
