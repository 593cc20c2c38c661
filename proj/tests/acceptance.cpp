// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "properties.hpp"

using namespace hdgnet;
using namespace hdgnet::testing;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Network bundled() { return load_network(HDGNET_DATA_DIR "/reference_network.json"); }

std::vector<double> halvings(int levels) {
  std::vector<double> hs;
  for (int i = 0; i < levels; ++i) hs.push_back(std::ldexp(1.0, -i));
  return hs;
}

std::string rates_text(const ConvergenceReport& rep) {
  std::ostringstream os;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) os << (i > 1 ? " " : "") << fmt("%.4f", rep.rows[i].rate);
  return os.str();
}

void convergence_table() {
  const std::vector<double> reference{0.0303, 0.0076, 0.0019, 0.0005, 0.0001};
  const auto rep = run_convergence_study(bundled(), 1, halvings(6), 5.0);
  print_convergence_table(std::cout, rep);
  bool pass = true;
  std::ostringstream os;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double rel = std::abs(rep.rows[i].err - reference[i]) / reference[i];
    if (rel > 0.10) pass = false;
    os << (i ? " " : "") << fmt("%.3g", rel);
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (!(rep.rows[i].rate >= 1.9 && rep.rows[i].rate <= 2.1)) pass = false;
  report(1, "convergence table, k=1, T=5, tau=h^2", pass,
         "relative deviations " + os.str() + " (tol 0.1); rates " + rates_text(rep) + " (need [1.9, 2.1])");

  // not gating: the same study with a subordinate time step and the L2 error
  // against the exact solution
  StudyOptions opts;
  opts.tau_rule = power_tau_rule(0.01, 2.0);
  opts.measure = ErrorMeasure::exact;
  const auto ref = run_convergence_study(bundled(), 1, halvings(5), 5.0, opts);
  std::ostringstream errs;
  for (const auto& r : ref.rows) errs << (&r == &ref.rows.front() ? "" : " ") << fmt("%.4f", r.err);
  std::printf("INFO [1] tau=h^2/100, exact L2 error: errors %s, rates %s\n", errs.str().c_str(),
              rates_text(ref).c_str());
}

void mass_balance() {
  const auto net = bundled();
  const Discretization d(net, build_mesh(net, 0.25), Basis(1));
  StepperConfig cfg;
  cfg.tau = 0.0625;
  cfg.final_time = 5.0;
  const auto ts = simulate(d, cfg);
  const double res = mass_balance_residual(ts);
  report(2, "discrete conservation at h=2^-2", res <= 1e-10,
         "max per-step residual " + fmt("%.3e", res) + " over " + std::to_string(ts.steps()) + " steps (tol 1e-10)");
}

void energy_identity() {
  std::mt19937 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto d = random_discretization(rng);
    const auto sys = assemble(d);
    const auto u = random_vector(rng, static_cast<Eigen::Index>(d.num_dofs()));
    worst = std::max(worst, energy_identity_residual(d, sys, u, random_inflow(rng, d)));
  }
  report(3, "semi-discrete energy identity, 100 random states", worst <= 1e-10,
         "max relative residual " + fmt("%.3e", worst) + " (tol 1e-10)");
}

void semi_ellipticity() {
  std::mt19937 rng(2025);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto d = random_discretization(rng);
    const auto w = random_vector(rng, static_cast<Eigen::Index>(d.num_dofs()));
    worst = std::max(worst, semi_ellipticity_residual(d, w, random_test_hybrid(rng, d)));
  }
  report(4, "semi-ellipticity, 100 random pairs", worst <= 1e-12,
         "max relative residual " + fmt("%.3e", worst) + " (tol 1e-12)");
}

void constant_state() {
  const double drift = constant_state_drift(bundled(), 0.7, 0.25, 1, 0.0625, 100);
  report(5, "constant state over 100 steps", drift <= 1e-12, "max deviation " + fmt("%.3e", drift) + " (tol 1e-12)");
}

void elimination() {
  const auto net = merge_y();
  const Discretization d(net, build_mesh(net, std::vector<std::size_t>{2, 2, 2}), Basis(1));
  const double gap = elimination_mismatch(d, 0.05, 50);
  report(6, "eliminated vs coupled system, Y-network, 50 steps", gap <= 1e-10,
         "max |u_elim - u_coupled| " + fmt("%.3e", gap) + " (tol 1e-10)");
}

void projection() {
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double l = u(rng), r = l + 0.05 + std::abs(u(rng));
    const double a = u(rng), w = u(rng);
    const auto f = [&](double x) { return std::sin(w * x + a) + a * x * x; };
    worst = std::max(worst, special_projection_defect(f, l, r, i % 4, i % 2 ? 1.0 : -1.0));
  }
  bool pass = worst <= 1e-12;
  std::ostringstream os;
  for (int k = 1; k <= 3; ++k) {
    os << " k=" << k << ":";
    for (double rate : special_projection_rates(k, 4)) {
      os << ' ' << fmt("%.3f", rate);
      if (std::abs(rate - (k + 1)) > 0.1) pass = false;
    }
  }
  report(7, "outflow-matching projection", pass,
         "max defect " + fmt("%.3e", worst) + " (tol 1e-12); rates" + os.str() + " (need k+1 +- 0.1)");
}

void oracle() {
  const OracleSolution o(bundled());
  double point = 0.0;
  for (double t : {1.0, 2.0, 5.0}) point = std::max(point, std::abs(o.evaluate(0, 1.0, t) - (t - 0.5) * (t - 0.5) / 25.0));
  double junction = 0.0;
  const auto cls = classify(o.network());
  for (int i = 0; i < 100; ++i) {
    const double t = 5.0 * i / 99.0;
    for (VertexIndex v : cls.of_kind(VertexKind::junction)) {
      double sum = 0.0, scale = 0.0;
      for (EdgeIndex e : cls[v].edges) {
        const auto& edge = o.network().edges[e];
        const double f = edge.flow * incidence(edge, v) * o.evaluate(e, coordinate_of(edge, v), t);
        sum += f;
        scale = std::max(scale, std::abs(f));
      }
      if (scale > 0) junction = std::max(junction, std::abs(sum) / scale);
    }
  }
  report(8, "exact solution cross-check", point <= 1e-14 && junction <= 1e-12,
         "point error " + fmt("%.3e", point) + " (tol 1e-14); junction balance " + fmt("%.3e", junction) +
             " (tol 1e-12)");
}

void order_sweep() {
  auto net = bundled();
  net.inflow[0] = BoundarySignal(Polynomial({0.0, 0.0, 0.0, 0.0, 1.0 / 625.0}));  // (t / 5)^4
  const bool compatible = check_compatibility(net).compatible();
  bool pass = compatible;
  std::ostringstream os;
  for (const auto& [k, levels] : {std::pair{0, 6}, std::pair{2, 4}}) {
    StudyOptions opts;
    opts.tau_rule = power_tau_rule(1.0, std::max(2, k + 1));
    const auto rep = run_convergence_study(net, k, halvings(levels), 5.0, opts);
    os << " k=" << k << ": " << rates_text(rep);
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
      if (!(rep.rows[i].rate >= k + 0.9)) pass = false;
  }
  report(9, "order sweep, g=(t/5)^4, tau=h^max(2,k+1)", pass,
         std::string(compatible ? "compatible data;" : "INCOMPATIBLE data;") + os.str() + " (need >= k+0.9)");
}

}  // namespace

int main() {
  try {
    convergence_table();
    mass_balance();
    energy_identity();
    semi_ellipticity();
    constant_state();
    elimination();
    projection();
    oracle();
    order_sweep();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
