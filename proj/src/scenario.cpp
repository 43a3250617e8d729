#include "scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace nocr {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw InvalidArgument("scenario: " + where + ": " + what);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) bad(where, "unknown key '" + k + "'");
}

template <class T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw std::runtime_error("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw std::runtime_error("");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw std::runtime_error("");
    } else {
      if (!v.is_string()) throw std::runtime_error("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    bad(where + "." + key, "wrong type");
  }
}

template <class T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) bad(where, "missing '" + std::string(key) + "'");
  return get<T>(j, key, where, T{});
}

std::vector<int> int_list(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) bad(where, "expected integers");
    out.push_back(v.get<int>());
  }
  return out;
}

AppSpec parse_app(const json& j, const std::string& where) {
  only_keys(j, where,
            {"name", "priority", "rows", "cols", "nodes", "links", "node_types", "allocator", "controller",
             "allocator_node"});
  AppSpec s;
  s.name = require<std::string>(j, "name", where);
  if (s.name.empty()) bad(where + ".name", "must not be empty");
  s.priority_rank = require<int>(j, "priority", where);
  bool grid = j.contains("rows") || j.contains("cols");
  bool expl = j.contains("nodes") || j.contains("links");
  if (grid == expl) bad(where, "give either rows/cols or nodes/links");
  if (grid) {
    s.grid_rows = require<int>(j, "rows", where);
    s.grid_cols = require<int>(j, "cols", where);
    if (s.grid_rows < 1 || s.grid_cols < 1) bad(where, "rows and cols must be positive");
  } else {
    s.explicit_nodes = require<int>(j, "nodes", where);
    if (j.contains("links")) {
      if (!j["links"].is_array()) bad(where + ".links", "expected an array");
      for (const auto& l : j["links"]) {
        auto ends = int_list(l, where + ".links");
        if (ends.size() != 2) bad(where + ".links", "each link has two endpoints");
        s.explicit_links.emplace_back(ends[0], ends[1]);
      }
    }
  }
  if (j.contains("node_types")) s.node_types = int_list(j["node_types"], where + ".node_types");
  s.is_allocator = get<bool>(j, "allocator", where, false);
  s.is_controller = get<bool>(j, "controller", where, false);
  if (j.contains("allocator_node")) s.allocator_node = require<int>(j, "allocator_node", where);
  if (s.is_allocator && !s.allocator_node) s.allocator_node = 0;
  return s;
}

}  // namespace

std::string to_string(FaultKind k) { return k == FaultKind::Crash ? "crash" : "computational"; }

FaultKind parse_fault_kind(std::string_view s) {
  if (s == "crash") return FaultKind::Crash;
  if (s == "computational" || s == "comp") return FaultKind::Computational;
  throw InvalidArgument("unknown fault kind '" + std::string(s) + "'");
}

PlatformGraph Scenario::graph() const {
  PlatformGraph g = build_mesh(rows, cols, torus);
  return cu_types.empty() ? g : g.with_cu_types(cu_types);
}

AppRegistry Scenario::registry() const { return AppRegistry(apps); }

Scenario parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("scenario: malformed JSON: ") + e.what());
  }
  only_keys(root, "root", {"platform", "applications", "options", "faults", "plant"});
  Scenario s;

  if (!root.contains("platform")) bad("root", "missing 'platform'");
  const json& p = root["platform"];
  only_keys(p, "platform", {"rows", "cols", "torus", "cu_types"});
  s.rows = require<int>(p, "rows", "platform");
  s.cols = require<int>(p, "cols", "platform");
  if (s.rows < 1 || s.cols < 1) bad("platform", "rows and cols must be positive");
  s.torus = get<bool>(p, "torus", "platform", false);
  if (p.contains("cu_types")) s.cu_types = int_list(p["cu_types"], "platform.cu_types");

  if (!root.contains("applications") || !root["applications"].is_array())
    bad("root", "'applications' must be an array");
  for (std::size_t i = 0; i < root["applications"].size(); ++i)
    s.apps.push_back(parse_app(root["applications"][i], "applications[" + std::to_string(i) + "]"));

  if (root.contains("options")) {
    const json& o = root["options"];
    only_keys(o, "options",
              {"orientation", "types", "degraded_vote", "vote_tolerance", "corruption_offset", "settle_ticks",
               "solver"});
    s.build.orientation = get<bool>(o, "orientation", "options", false);
    s.build.types = get<bool>(o, "types", "options", false);
    s.sim.degraded_vote = get<bool>(o, "degraded_vote", "options", false);
    s.sim.vote_tolerance = get<double>(o, "vote_tolerance", "options", s.sim.vote_tolerance);
    s.sim.corruption_offset = get<double>(o, "corruption_offset", "options", s.sim.corruption_offset);
    s.sim.settle_ticks = get<long long>(o, "settle_ticks", "options", s.sim.settle_ticks);
    if (s.sim.vote_tolerance < 0) bad("options.vote_tolerance", "must be >= 0");
    if (s.sim.settle_ticks < 0) bad("options.settle_ticks", "must be >= 0");
    if (o.contains("solver")) {
      const json& so = o["solver"];
      only_keys(so, "options.solver", {"timeout_ms", "node_limit"});
      s.solver.timeout_ms = get<long long>(so, "timeout_ms", "options.solver", s.solver.timeout_ms);
      s.solver.node_limit = get<long long>(so, "node_limit", "options.solver", s.solver.node_limit);
      if (s.solver.timeout_ms <= 0 || s.solver.node_limit <= 0) bad("options.solver", "limits must be positive");
    }
  }

  if (root.contains("faults")) {
    if (!root["faults"].is_array()) bad("faults", "expected an array");
    long long last = 0;
    for (std::size_t i = 0; i < root["faults"].size(); ++i) {
      std::string where = "faults[" + std::to_string(i) + "]";
      const json& f = root["faults"][i];
      only_keys(f, where, {"t", "cu", "kind", "action"});
      FaultEvent e;
      e.t = require<long long>(f, "t", where);
      e.cu = require<int>(f, "cu", where);
      try {
        e.kind = parse_fault_kind(get<std::string>(f, "kind", where, "crash"));
      } catch (const InvalidArgument& ex) {
        bad(where + ".kind", ex.what());
      }
      std::string action = get<std::string>(f, "action", where, "inject");
      if (action == "inject")
        e.action = FaultAction::Inject;
      else if (action == "recover")
        e.action = FaultAction::Recover;
      else
        bad(where + ".action", "must be inject or recover");
      if (e.t < 0) bad(where + ".t", "must be >= 0");
      if (e.t < last) bad(where + ".t", "fault times must be nondecreasing");
      if (e.cu < 0 || e.cu >= s.rows * s.cols) bad(where + ".cu", "no such CU");
      last = e.t;
      s.faults.push_back(e);
    }
  }

  if (root.contains("plant")) {
    const json& pl = root["plant"];
    only_keys(pl, "plant", {"reference", "gain_kp", "time_constant", "max_thrust", "dt"});
    s.plant.reference = get<double>(pl, "reference", "plant", s.plant.reference);
    s.plant.gain_kp = get<double>(pl, "gain_kp", "plant", s.plant.gain_kp);
    s.plant.time_constant = get<double>(pl, "time_constant", "plant", s.plant.time_constant);
    s.plant.max_thrust = get<double>(pl, "max_thrust", "plant", s.plant.max_thrust);
    s.plant.dt = get<double>(pl, "dt", "plant", s.plant.dt);
    if (!(s.plant.time_constant > 0)) bad("plant.time_constant", "must be positive");
    if (!(s.plant.dt > 0)) bad("plant.dt", "must be positive");
  }

  // Surface model errors (ranks, types, CU type length) at load time.
  try {
    PlatformGraph g = s.graph();
    AppRegistry reg = s.registry();
    (void)g;
    (void)reg;
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Allocation parse_allocation(std::string_view text, int n_nodes, int n_cus) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("allocation: malformed JSON: ") + e.what());
  }
  only_keys(root, "allocation", {"hosts"});
  if (!root.contains("hosts")) bad("allocation", "missing 'hosts'");
  Allocation a;
  a.host = int_list(root["hosts"], "allocation.hosts");
  if (static_cast<int>(a.host.size()) != n_nodes)
    throw InvalidArgument("allocation: expected " + std::to_string(n_nodes) + " hosts");
  std::set<int> used;
  for (int h : a.host) {
    if (h < -1 || h >= n_cus) throw InvalidArgument("allocation: host " + std::to_string(h) + " out of range");
    if (h >= 0 && !used.insert(h).second)
      throw InvalidArgument("allocation: CU " + std::to_string(h) + " hosts two nodes");
  }
  return a;
}

}  // namespace nocr
