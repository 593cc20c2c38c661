#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "hdgnet/errors.hpp"
#include "hdgnet/hdg_operator.hpp"
#include "hdgnet/projection.hpp"

namespace hdgnet {

enum class Scheme { implicit_euler, crank_nicolson };

inline const char* to_string(Scheme s) { return s == Scheme::implicit_euler ? "implicit-euler" : "crank-nicolson"; }

struct StepperConfig {
  double tau = 0.01;
  double final_time = 1.0;
  Scheme scheme = Scheme::implicit_euler;
  /// Keep every n-th state in the series (the final state is always kept).
  std::size_t snapshot_every = 1;
  /// Refactorize the system matrix at every step instead of caching it.
  bool refactor_each_step = false;
};

struct TimeSeries {
  std::vector<double> times;              // t_0 = 0 < t_1 < ... < t_N = T
  std::vector<Diagnostics> diagnostics;   // one per entry of `times`
  std::vector<std::size_t> snapshot_steps;
  std::vector<State> snapshots;           // states at snapshot_steps

  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
  const State& final_state() const { return snapshots.back(); }
};

/// Time grid t_n = n tau, with the last step shortened to land on T.
inline std::vector<double> time_grid(double tau, double final_time) {
  if (!(tau > 0.0)) throw InvalidArgument("time step must be positive");
  if (!(final_time >= 0.0)) throw InvalidArgument("final time must be nonnegative");
  std::vector<double> t{0.0};
  if (final_time == 0.0) return t;
  const auto n = static_cast<std::size_t>(std::ceil(final_time / tau * (1.0 - 1e-12)));
  for (std::size_t i = 1; i < n; ++i) t.push_back(static_cast<double>(i) * tau);
  t.push_back(final_time);
  return t;
}

/// One-step implicit scheme for M u' + B u = G g with cached factorizations
/// of the constant system matrix (one per distinct step size).
class ImplicitStepper {
 public:
  using Solver = Eigen::SparseLU<Eigen::SparseMatrix<double>>;

  ImplicitStepper(const Discretization& disc, const OdeSystem& sys, Scheme scheme = Scheme::implicit_euler,
                  bool refactor_each_step = false)
      : disc_(&disc), sys_(&sys), scheme_(scheme), refactor_(refactor_each_step) {}

  /// Advances `st` by tau. For implicit Euler:
  ///   (M + tau B) u^{n+1} = M u^n + tau G g(t_{n+1}).
  State step(const State& st, double tau, std::size_t step_index = 0) {
    return step(st, tau, st.t + tau, step_index);
  }

  /// Same as above with the new time level given explicitly.
  State step(const State& st, double tau, double t1, std::size_t step_index) {
    const Eigen::VectorXd g1 = disc_->boundary_values(t1);
    Eigen::VectorXd rhs;
    double theta = 1.0;
    if (scheme_ == Scheme::implicit_euler) {
      rhs = sys_->mass * st.u + tau * (sys_->input * g1);
    } else {
      theta = 0.5;
      const Eigen::VectorXd g0 = disc_->boundary_values(st.t);
      rhs = sys_->mass * st.u - 0.5 * tau * (sys_->flux * st.u) + 0.5 * tau * (sys_->input * (g0 + g1));
    }
    Solver& solver = factorization(theta * tau, step_index);
    State next;
    next.u = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw SolverError("linear solve failed", step_index);
    next.t = t1;
    next.uhat = sys_->hybrid(next.u, g1);
    return next;
  }

 private:
  Solver& factorization(double scaled_tau, std::size_t step_index) {
    auto it = cache_.find(scaled_tau);
    if (it != cache_.end() && !refactor_) return *it->second;
    Eigen::SparseMatrix<double> a = sys_->mass + scaled_tau * sys_->flux;
    a.makeCompressed();
    auto solver = std::make_unique<Solver>();
    solver->analyzePattern(a);
    solver->factorize(a);
    if (solver->info() != Eigen::Success) throw SolverError("factorization of M + tau B failed", step_index);
    auto& slot = cache_[scaled_tau];
    slot = std::move(solver);
    return *slot;
  }

  const Discretization* disc_;
  const OdeSystem* sys_;
  Scheme scheme_;
  bool refactor_;
  std::map<double, std::unique_ptr<Solver>> cache_;
};

/// Called after every step with (step index, state).
using StepObserver = std::function<void(std::size_t, const State&)>;

/// Projects the initial data and marches to the final time, recording
/// diagnostics at every step.
inline TimeSeries simulate(const Discretization& disc, const StepperConfig& cfg, const StepObserver& observer = {}) {
  if (!(cfg.tau > 0.0)) throw InvalidArgument("time step must be positive");
  if (cfg.snapshot_every == 0) throw InvalidArgument("snapshot_every must be at least 1");
  const auto grid = time_grid(cfg.tau, cfg.final_time);
  const OdeSystem sys = assemble(disc);
  ImplicitStepper stepper(disc, sys, cfg.scheme, cfg.refactor_each_step);

  TimeSeries ts;
  State st = make_state(disc, l2_project_initial(disc.network(), disc.mesh(), disc.basis()), 0.0);
  auto record = [&](std::size_t n) {
    ts.times.push_back(st.t);
    ts.diagnostics.push_back(compute_diagnostics(disc, st));
    if (n % cfg.snapshot_every == 0 || n + 1 == grid.size()) {
      ts.snapshot_steps.push_back(n);
      ts.snapshots.push_back(st);
    }
    if (observer) observer(n, st);
  };
  record(0);
  for (std::size_t n = 1; n < grid.size(); ++n) {
    double tau = grid[n] - grid[n - 1];
    if (std::abs(tau - cfg.tau) <= 1e-12 * cfg.tau) tau = cfg.tau;  // one factorization for uniform steps
    st = stepper.step(st, tau, grid[n], n);
    record(n);
  }
  return ts;
}

}  // namespace hdgnet
