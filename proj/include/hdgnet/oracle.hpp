#pragma once

// Exact solution by backward characteristic tracing (constant a, b per
// edge), the interpolation-based error measure and the refinement study.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "hdgnet/errors.hpp"
#include "hdgnet/hdg_operator.hpp"
#include "hdgnet/projection.hpp"
#include "hdgnet/time_integration.hpp"

namespace hdgnet {

class OracleSolution {
 public:
  /// Throws OracleUnavailable unless the network passes validate().
  explicit OracleSolution(Network net, std::size_t memo_capacity = 1u << 18)
      : net_(std::move(net)), memo_capacity_(memo_capacity) {
    const auto report = validate(net_);
    if (!report.ok())
      throw OracleUnavailable("exact solution unavailable: " + report.failures.front().check + " at '" +
                              report.failures.front().location + "'");
    cls_ = classify(net_);
    for (const auto& e : net_.edges) travel_.push_back(e.area * e.length / std::abs(e.flow));
  }

  OracleSolution(const OracleSolution& o) : OracleSolution(o.net_, o.memo_capacity_) {}

  const Network& network() const { return net_; }

  /// T^e = a^e l^e / |b^e|
  double travel_time(EdgeIndex e) const { return travel_[e]; }

  /// Exact concentration at coordinate x of edge e and time t >= 0.
  double evaluate(EdgeIndex e, double x, double t) const {
    if (e >= net_.num_edges()) throw InvalidArgument("oracle: unknown edge");
    const auto& edge = net_.edges[e];
    if (!(x >= 0.0 && x <= edge.length)) throw InvalidArgument("oracle: x outside the edge");
    if (!(t >= 0.0)) throw InvalidArgument("oracle: negative time");
    return evaluate_unchecked(e, x, t);
  }

  /// Mixing value û^v(t) for t >= 0.
  double vertex_value(VertexIndex v, double t) const {
    const auto& info = cls_[v];
    if (info.kind == VertexKind::inflow_boundary) return net_.inflow.at(v)(t);
    const Key key{v, std::bit_cast<std::uint64_t>(t)};
    {
      std::lock_guard lock(mutex_);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    double s = 0.0;
    for (EdgeIndex e : info.in_edges) {
      const auto& edge = net_.edges[e];
      s += edge.flow * incidence(edge, v) * evaluate_unchecked(e, coordinate_of(edge, v), t);
    }
    s /= info.inflow_weight;
    std::lock_guard lock(mutex_);
    if (memo_.size() >= memo_capacity_) memo_.clear();
    memo_.emplace(key, s);
    return s;
  }

 private:
  struct Key {
    VertexIndex v;
    std::uint64_t t;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return std::hash<std::uint64_t>{}(k.t * 0x9E3779B97F4A7C15ull ^ k.v); }
  };

  double evaluate_unchecked(EdgeIndex e, double x, double t) const {
    const auto& edge = net_.edges[e];
    const bool forward = edge.flow > 0;
    const double dist = forward ? x : edge.length - x;  // from the inflow end
    const double delay = edge.area * dist / std::abs(edge.flow);
    if (t >= delay) return vertex_value(forward ? edge.tail : edge.head, t - delay);
    return net_.initial_on(e)(x - edge.flow / edge.area * t);
  }

  Network net_;
  VertexClassification cls_;
  std::vector<double> travel_;
  std::size_t memo_capacity_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<Key, double, KeyHash> memo_;
};

/// ||I_h u(t) - u_h||_{L2(E)} for a single state, integrated exactly in the
/// Legendre coefficients (the difference is in P_k on every element).
inline double interpolation_error(const Discretization& d, const NodalInterpolator& interp,
                                  const OracleSolution& oracle, const State& st) {
  const auto& mesh = d.mesh();
  double sum = 0.0;
  for (ElementIndex el = 0; el < mesh.num_elements(); ++el) {
    const auto edge = mesh.ref(el).edge;
    const auto c = interp.interpolate([&](double x) { return oracle.evaluate(edge, x, st.t); }, mesh.left(el),
                                      mesh.right(el));
    double local = 0.0;
    for (std::size_t j = 0; j < d.block(); ++j) {
      const double diff = c[j] - st.u(d.dof(el, j));
      local += d.basis().norm2(j) * diff * diff;
    }
    sum += 0.5 * mesh.size(el) * local;
  }
  return std::sqrt(sum);
}

/// max over stored states of ||I_h u(t_n) - u_h^n||_{L2(E)}.
inline double error_norm(const TimeSeries& series, const OracleSolution& oracle, const Discretization& d) {
  const NodalInterpolator interp(d.basis());
  double err = 0.0;
  for (const auto& st : series.snapshots) err = std::max(err, interpolation_error(d, interp, oracle, st));
  return err;
}

struct ConvergenceRow {
  double h = 0.0;
  double tau = 0.0;
  double err = 0.0;
  double rate = std::numeric_limits<double>::quiet_NaN();  // NaN on the first level
  std::size_t steps = 0;
};

struct ConvergenceReport {
  int k = 1;
  double final_time = 0.0;
  std::vector<ConvergenceRow> rows;

  /// Rates on the finest three levels within +-0.1 of k + 1.
  bool rates_pass(double tolerance = 0.1) const {
    std::size_t checked = 0;
    for (std::size_t i = rows.size(); i-- > 1 && checked < 3; ++checked)
      if (std::abs(rows[i].rate - (k + 1)) > tolerance) return false;
    return checked > 0;
  }
};

/// ||u(t) - u_h||_{L2(E)} against the exact solution itself, integrated
/// with the given rule on every element.
inline double exact_error(const Discretization& d, const OracleSolution& oracle, const State& st,
                          const QuadratureRule& rule) {
  const auto& mesh = d.mesh();
  double sum = 0.0;
  for (ElementIndex el = 0; el < mesh.num_elements(); ++el) {
    const auto edge = mesh.ref(el).edge;
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double xi = rule.points[q];
      const double diff = oracle.evaluate(edge, mesh.to_edge(el, xi), st.t) - d.value(st.u, el, xi);
      local += rule.weights[q] * diff * diff;
    }
    sum += 0.5 * mesh.size(el) * local;
  }
  return std::sqrt(sum);
}

using TauRule = std::function<double(double)>;

/// tau = scale * h^power
inline TauRule power_tau_rule(double scale, double power) {
  return [scale, power](double h) { return scale * std::pow(h, power); };
}

enum class ErrorMeasure {
  interpolant,  // max_n ||I_h u(t_n) - u_h^n||
  exact         // max_n ||u(t_n) - u_h^n||, high-order quadrature
};

struct StudyOptions {
  TauRule tau_rule;  // defaults to tau = h^2
  Scheme scheme = Scheme::implicit_euler;
  ErrorMeasure measure = ErrorMeasure::interpolant;
};

/// One simulation plus error measurement per mesh size; rates are
/// log2(err_i / err_{i+1}) between successive levels.
inline ConvergenceReport run_convergence_study(const Network& net, int k, const std::vector<double>& hs,
                                               double final_time, const StudyOptions& opts = {}) {
  if (hs.empty()) throw InvalidArgument("convergence study needs at least one mesh size");
  for (std::size_t i = 1; i < hs.size(); ++i)
    if (std::abs(hs[i - 1] / hs[i] - 2.0) > 1e-12) throw InvalidArgument("mesh sizes must halve from level to level");
  const TauRule rule = opts.tau_rule ? opts.tau_rule : power_tau_rule(1.0, 2.0);
  const OracleSolution oracle(net);
  const auto fine_rule = gauss_legendre(k + 8);

  ConvergenceReport rep;
  rep.k = k;
  rep.final_time = final_time;
  for (std::size_t level = 0; level < hs.size(); ++level) {
    ConvergenceRow row;
    row.h = hs[level];
    row.tau = rule(row.h);
    try {
      const Discretization d(net, build_mesh(net, row.h), Basis(k));
      const NodalInterpolator interp(d.basis());
      StepperConfig cfg;
      cfg.tau = row.tau;
      cfg.final_time = final_time;
      cfg.scheme = opts.scheme;
      cfg.snapshot_every = std::numeric_limits<std::size_t>::max();
      const auto ts = simulate(d, cfg, [&](std::size_t, const State& st) {
        const double e = opts.measure == ErrorMeasure::interpolant ? interpolation_error(d, interp, oracle, st)
                                                                   : exact_error(d, oracle, st, fine_rule);
        row.err = std::max(row.err, e);
      });
      row.steps = ts.steps();
    } catch (const SolverError& e) {
      throw SolverError("level " + std::to_string(level) + ": " + e.what(), e.step_index);
    } catch (const Error& e) {
      throw Error("level " + std::to_string(level) + ": " + e.what());
    }
    if (level > 0) row.rate = std::log2(rep.rows.back().err / row.err);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace hdgnet
