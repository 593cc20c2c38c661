// hdgnet: validate, simulate and study transport on pipe networks.
//
// Exit codes: 0 ok, 1 domain failure, 2 parse error, 3 solver failure,
// 4 exact solution unavailable.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hdgnet/hdgnet.hpp"

namespace fs = std::filesystem;
using namespace hdgnet;

namespace {

enum Exit { kOk = 0, kDomain = 1, kParse = 2, kSolver = 3, kNoOracle = 4 };

struct Loaded {
  Network net;
  std::string text;
};

Loaded load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  Loaded l{parse_network(ss.str()), ss.str()};
  return l;
}

void print_failures(std::ostream& os, const ValidationReport& rep) {
  for (const auto& f : rep.failures) {
    os << "FAIL " << f.check;
    if (!f.location.empty()) os << " at " << f.location;
    os << ": " << f.message;
    if (f.defect != 0.0) os << " (defect " << f.defect << ")";
    os << '\n';
  }
}

/// Fails with exit 1 when the network is invalid; warns on incompatible data.
bool require_valid(const Network& net) {
  const auto rep = validate(net);
  if (!rep.ok()) {
    std::cerr << "invalid network:\n";
    print_failures(std::cerr, rep);
    return false;
  }
  const auto compat = check_compatibility(net);
  if (!compat.compatible())
    std::cerr << "warning: initial and boundary data incompatible at t = 0 (max defect " << compat.max_defect()
              << ")\n";
  return true;
}

int cmd_validate(const std::string& path, bool as_json) {
  const auto loaded = load(path);
  const auto& net = loaded.net;
  const auto rep = validate(net);
  nlohmann::json j;
  j["valid"] = rep.ok();
  j["junctions_checked"] = rep.junctions_checked;
  j["condition_tolerance"] = rep.condition_tolerance;
  j["failures"] = nlohmann::json::array();
  for (const auto& f : rep.failures)
    j["failures"].push_back({{"check", f.check}, {"location", f.location}, {"message", f.message}, {"defect", f.defect}});

  bool structure_ok = rep.find("structure") == nullptr;
  if (structure_ok) {
    const auto cls = classify(net);
    for (VertexIndex v = 0; v < net.num_vertices(); ++v) {
      auto names = [&](const std::vector<EdgeIndex>& es) {
        std::vector<std::string> out;
        for (auto e : es) out.push_back(net.edges[e].id);
        return out;
      };
      j["vertices"][net.vertices[v]] = {{"kind", to_string(cls[v].kind)},
                                        {"in_edges", names(cls[v].in_edges)},
                                        {"out_edges", names(cls[v].out_edges)}};
    }
  }
  if (rep.ok()) {
    const auto compat = check_compatibility(net);
    j["compatible"] = compat.compatible();
    j["compatibility_defect"] = compat.max_defect();
  }

  if (as_json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "network: " << net.num_vertices() << " vertices, " << net.num_edges() << " edges\n";
    if (structure_ok) {
      const auto cls = classify(net);
      auto list = [&](VertexKind k) {
        std::string s;
        for (auto v : cls.of_kind(k)) s += (s.empty() ? "" : ", ") + net.vertices[v];
        return s.empty() ? std::string("-") : s;
      };
      std::cout << "inflow vertices: " << list(VertexKind::inflow_boundary) << '\n'
                << "outflow vertices: " << list(VertexKind::outflow_boundary) << '\n'
                << "junctions: " << list(VertexKind::junction) << '\n';
    }
    if (rep.ok()) {
      std::cout << "(C) satisfied at " << rep.junctions_checked << " junctions\n";
      const auto compat = check_compatibility(net);
      if (compat.compatible())
        std::cout << "initial data compatible with boundary data\n";
      else
        std::cout << "warning: initial data incompatible (max defect " << compat.max_defect() << ")\n";
      std::cout << "valid\n";
    } else {
      print_failures(std::cout, rep);
      std::cout << "invalid\n";
    }
  }
  return rep.ok() ? kOk : kDomain;
}

struct RunArgs {
  double h = 1.0;
  int order = 1;
  double tau = 0.0;  // 0: use h^2
  double final_time = 5.0;
  std::string out = "out";
  std::size_t snapshot_every = 1;
  std::string scheme = "implicit-euler";
};

Scheme parse_scheme(const std::string& s) {
  if (s == "crank-nicolson") return Scheme::crank_nicolson;
  return Scheme::implicit_euler;
}

int cmd_run(const std::string& path, const RunArgs& a) {
  const auto loaded = load(path);
  if (!require_valid(loaded.net)) return kDomain;
  const Discretization d(loaded.net, build_mesh(loaded.net, a.h), Basis(a.order));
  StepperConfig cfg;
  cfg.tau = a.tau > 0 ? a.tau : a.h * a.h;
  cfg.final_time = a.final_time;
  cfg.scheme = parse_scheme(a.scheme);
  cfg.snapshot_every = a.snapshot_every;
  const auto ts = simulate(d, cfg);

  fs::create_directories(a.out);
  {
    std::ofstream os(fs::path(a.out) / "diagnostics.csv", std::ios::binary);
    write_diagnostics_csv(os, d, ts);
  }
  {
    std::ofstream os(fs::path(a.out) / "snapshots.csv", std::ios::binary);
    write_snapshots_csv(os, d, ts);
  }
  RunMetadata meta;
  meta.config_hash = fnv1a_hex(loaded.text);
  meta.k = a.order;
  meta.h = d.mesh().h();
  meta.tau = cfg.tau;
  meta.final_time = cfg.final_time;
  meta.scheme = cfg.scheme;
  meta.steps = ts.steps();
  meta.snapshot_every = cfg.snapshot_every;
  std::ofstream(fs::path(a.out) / "meta.json") << metadata_json(meta, d).dump(2) << '\n';
  std::cout << "wrote " << ts.steps() << " steps to " << a.out << '\n';
  return kOk;
}

struct ConvergeArgs {
  int order = 1;
  int levels = 6;
  double final_time = 5.0;
  double h0 = 1.0;
  double tau_scale = 1.0;
  double tau_power = 0.0;  // 0: max(2, k + 1)
  std::string measure = "interpolant";
  std::string scheme = "implicit-euler";
  std::string out = "out";
};

int cmd_converge(const std::string& path, const ConvergeArgs& a) {
  const auto loaded = load(path);
  if (!require_valid(loaded.net)) return kDomain;
  std::vector<double> hs;
  for (int i = 0; i < a.levels; ++i) hs.push_back(std::ldexp(a.h0, -i));
  StudyOptions opts;
  const double power = a.tau_power > 0 ? a.tau_power : std::max(2.0, a.order + 1.0);
  opts.tau_rule = power_tau_rule(a.tau_scale, power);
  opts.scheme = parse_scheme(a.scheme);
  opts.measure = a.measure == "exact" ? ErrorMeasure::exact : ErrorMeasure::interpolant;
  const auto rep = run_convergence_study(loaded.net, a.order, hs, a.final_time, opts);
  print_convergence_table(std::cout, rep);
  fs::create_directories(a.out);
  std::ofstream os(fs::path(a.out) / "convergence.csv", std::ios::binary);
  write_convergence_csv(os, rep);
  return kOk;
}

int cmd_oracle(const std::string& path, const std::string& edge_id, double x, double t) {
  const auto loaded = load(path);
  if (!require_valid(loaded.net)) return kDomain;
  const OracleSolution oracle(loaded.net);
  const auto e = loaded.net.find_edge(edge_id);
  if (!e) {
    std::cerr << "unknown edge '" << edge_id << "'\n";
    return kDomain;
  }
  if (!(x >= 0.0 && x <= loaded.net.edges[*e].length) || !(t >= 0.0)) {
    std::cerr << "x must lie in [0, length] and t must be nonnegative\n";
    return kDomain;
  }
  std::cout << format_real(oracle.evaluate(*e, x, t)) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid DG transport solver for pipe networks"};
  app.require_subcommand(1);

  std::string config;
  bool as_json = false;
  auto* validate_cmd = app.add_subcommand("validate", "check a network configuration");
  validate_cmd->add_option("config", config, "network JSON file")->required();
  validate_cmd->add_flag("--json", as_json, "machine-readable report");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "simulate and write diagnostics/snapshots");
  run_cmd->set_help_flag("--help", "print this help message and exit");  // -h is the mesh size
  run_cmd->add_option("config", config, "network JSON file")->required();
  run_cmd->add_option("--h", run.h, "target mesh size")->check(CLI::PositiveNumber);
  run_cmd->add_option("--order,-k", run.order, "polynomial degree")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--tau", run.tau, "time step (default h^2)")->check(CLI::PositiveNumber);
  run_cmd->add_option("--T", run.final_time, "final time")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_option("--snapshot-every", run.snapshot_every, "keep every n-th state")->check(CLI::PositiveNumber);
  run_cmd->add_option("--scheme", run.scheme, "time integrator")
      ->check(CLI::IsMember({"implicit-euler", "crank-nicolson"}));

  ConvergeArgs conv;
  auto* conv_cmd = app.add_subcommand("converge", "mesh refinement study against the exact solution");
  conv_cmd->set_help_flag("--help", "print this help message and exit");
  conv_cmd->add_option("config", config, "network JSON file")->required();
  conv_cmd->add_option("--order,-k", conv.order, "polynomial degree")->check(CLI::NonNegativeNumber);
  conv_cmd->add_option("--levels", conv.levels, "number of halvings of h")->check(CLI::PositiveNumber);
  conv_cmd->add_option("--T", conv.final_time, "final time")->check(CLI::NonNegativeNumber);
  conv_cmd->add_option("--h0", conv.h0, "coarsest mesh size")->check(CLI::PositiveNumber);
  conv_cmd->add_option("--tau-scale", conv.tau_scale, "tau = scale * h^power")->check(CLI::PositiveNumber);
  conv_cmd->add_option("--tau-power", conv.tau_power, "default max(2, k + 1)")->check(CLI::PositiveNumber);
  conv_cmd->add_option("--measure", conv.measure, "error measure")->check(CLI::IsMember({"interpolant", "exact"}));
  conv_cmd->add_option("--scheme", conv.scheme, "time integrator")
      ->check(CLI::IsMember({"implicit-euler", "crank-nicolson"}));
  conv_cmd->add_option("--out", conv.out, "output directory");

  std::string edge;
  double x = 0.0, t = 0.0;
  auto* oracle_cmd = app.add_subcommand("oracle", "evaluate the exact solution");
  oracle_cmd->add_option("config", config, "network JSON file")->required();
  oracle_cmd->add_option("--edge", edge, "edge id")->required();
  oracle_cmd->add_option("--x", x, "edge coordinate")->required();
  oracle_cmd->add_option("--t", t, "time")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*validate_cmd) return cmd_validate(config, as_json);
    if (*run_cmd) return cmd_run(config, run);
    if (*conv_cmd) return cmd_converge(config, conv);
    if (*oracle_cmd) return cmd_oracle(config, edge, x, t);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const OracleUnavailable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoOracle;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  }
  return kOk;
}
