#pragma once

// JSON network configuration reader/writer.

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hdgnet/errors.hpp"
#include "hdgnet/network.hpp"

namespace hdgnet {

namespace detail {

using nlohmann::json;

inline double number_at(const json& obj, const std::string& key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(ctx + ": missing key '" + key + "'");
  if (!it->is_number()) throw ConfigError(ctx + "." + key + ": expected a number");
  return it->get<double>();
}

inline std::string string_at(const json& obj, const std::string& key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(ctx + ": missing key '" + key + "'");
  if (!it->is_string()) throw ConfigError(ctx + "." + key + ": expected a string");
  return it->get<std::string>();
}

inline Polynomial coeff_list(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ConfigError(ctx + ": expected an array of coefficients");
  std::vector<double> c;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(ctx + "[" + std::to_string(i) + "]: expected a number");
    c.push_back(j[i].get<double>());
  }
  return Polynomial(std::move(c));
}

inline BoundarySignal signal_spec(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected a signal object");
  const auto type = string_at(j, "type", ctx);
  if (type == "poly") {
    auto it = j.find("coeffs");
    if (it == j.end()) throw ConfigError(ctx + ": missing key 'coeffs'");
    return BoundarySignal(coeff_list(*it, ctx + ".coeffs"));
  }
  if (type == "builtin") {
    const auto name = string_at(j, "name", ctx);
    if (auto s = BoundarySignal::builtin(name)) return *s;
    throw ConfigError(ctx + ".name: unknown builtin signal '" + name + "'");
  }
  throw ConfigError(ctx + ".type: unknown signal type '" + type + "'");
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace detail

/// Parses a network configuration. Throws ConfigError with line or key
/// context on malformed input; semantic checks are left to validate().
inline Network parse_network(const std::string& text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error at line " + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError("top level: expected an object");

  Network net;
  auto vit = root.find("vertices");
  if (vit == root.end() || !vit->is_array()) throw ConfigError("vertices: expected an array of ids");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < vit->size(); ++i) {
    const auto& v = (*vit)[i];
    if (!v.is_string()) throw ConfigError("vertices[" + std::to_string(i) + "]: expected a string");
    auto name = v.get<std::string>();
    if (!seen.insert(name).second) throw ConfigError("vertices[" + std::to_string(i) + "]: duplicate id '" + name + "'");
    net.vertices.push_back(std::move(name));
  }

  auto eit = root.find("edges");
  if (eit == root.end() || !eit->is_array()) throw ConfigError("edges: expected an array of edge objects");
  seen.clear();
  for (std::size_t i = 0; i < eit->size(); ++i) {
    const auto& ej = (*eit)[i];
    const auto ctx = "edges[" + std::to_string(i) + "]";
    if (!ej.is_object()) throw ConfigError(ctx + ": expected an object");
    Edge e;
    e.id = detail::string_at(ej, "id", ctx);
    if (!seen.insert(e.id).second) throw ConfigError(ctx + ".id: duplicate id '" + e.id + "'");
    const auto tail = detail::string_at(ej, "tail", ctx);
    const auto head = detail::string_at(ej, "head", ctx);
    auto t = net.find_vertex(tail);
    auto h = net.find_vertex(head);
    if (!t) throw ConfigError(ctx + ".tail: unknown vertex '" + tail + "'");
    if (!h) throw ConfigError(ctx + ".head: unknown vertex '" + head + "'");
    e.tail = *t;
    e.head = *h;
    e.length = detail::number_at(ej, "length", ctx);
    e.area = detail::number_at(ej, "area", ctx);
    e.flow = detail::number_at(ej, "flow", ctx);
    net.edges.push_back(std::move(e));
  }
  net.initial.assign(net.edges.size(), Polynomial{});

  if (auto it = root.find("inflow"); it != root.end()) {
    if (!it->is_object()) throw ConfigError("inflow: expected an object keyed by vertex id");
    for (const auto& [name, spec] : it->items()) {
      auto v = net.find_vertex(name);
      if (!v) throw ConfigError("inflow." + name + ": unknown vertex");
      net.inflow[*v] = detail::signal_spec(spec, "inflow." + name);
    }
  }
  if (auto it = root.find("initial"); it != root.end()) {
    if (!it->is_object()) throw ConfigError("initial: expected an object keyed by edge id");
    for (const auto& [id, coeffs] : it->items()) {
      auto e = net.find_edge(id);
      if (!e) throw ConfigError("initial." + id + ": unknown edge");
      net.initial[*e] = detail::coeff_list(coeffs, "initial." + id);
    }
  }
  if (auto it = root.find("a0"); it != root.end()) {
    if (!it->is_number()) throw ConfigError("a0: expected a number");
    net.a0 = it->get<double>();
  }
  return net;
}

inline Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

inline nlohmann::json network_to_json(const Network& net) {
  using detail::json;
  json root;
  root["vertices"] = net.vertices;
  root["edges"] = json::array();
  for (const auto& e : net.edges)
    root["edges"].push_back({{"id", e.id},
                             {"tail", net.vertices.at(e.tail)},
                             {"head", net.vertices.at(e.head)},
                             {"length", e.length},
                             {"area", e.area},
                             {"flow", e.flow}});
  root["inflow"] = json::object();
  for (const auto& [v, sig] : net.inflow) {
    if (!sig.builtin_name().empty())
      root["inflow"][net.vertices.at(v)] = {{"type", "builtin"}, {"name", sig.builtin_name()}};
    else
      root["inflow"][net.vertices.at(v)] = {{"type", "poly"}, {"coeffs", sig.polynomial().coeffs()}};
  }
  root["initial"] = json::object();
  for (std::size_t e = 0; e < net.initial.size() && e < net.edges.size(); ++e)
    if (!net.initial[e].coeffs().empty()) root["initial"][net.edges[e].id] = net.initial[e].coeffs();
  root["a0"] = net.a0;
  return root;
}

}  // namespace hdgnet
