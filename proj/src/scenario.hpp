#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "appmodel.hpp"
#include "ilp.hpp"
#include "platform.hpp"
#include "solver.hpp"

namespace nocr {

enum class FaultKind { Crash, Computational };
enum class FaultAction { Inject, Recover };

std::string to_string(FaultKind k);
FaultKind parse_fault_kind(std::string_view s);

struct FaultEvent {
  long long t = 0;
  int cu = 0;
  FaultKind kind = FaultKind::Crash;
  FaultAction action = FaultAction::Inject;
};

struct PlantParams {
  double reference = 1.0;
  double gain_kp = 2.0;
  double time_constant = 0.5;
  double max_thrust = 2.0;
  double dt = 0.05;
};

struct SimOptions {
  bool degraded_vote = false;
  double vote_tolerance = 1e-9;
  /// Added to a corrupted controller output, scaled by (1 + replica index)
  /// so that two corrupted replicas never agree with each other.
  double corruption_offset = 0.5;
  /// Ticks simulated after the last scheduled fault event.
  long long settle_ticks = 60;
};

struct Scenario {
  int rows = 1;
  int cols = 1;
  bool torus = false;
  std::vector<int> cu_types;
  std::vector<AppSpec> apps;
  BuildOptions build;
  SolverConfig solver;
  SimOptions sim;
  std::vector<FaultEvent> faults;  // nondecreasing t
  PlantParams plant;

  PlatformGraph graph() const;
  AppRegistry registry() const;
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// InvalidArgument with a message naming the offending field.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario_file(const std::string& path);

/// Reads {"hosts": [...]} with one CU index (or -1) per global node.
Allocation parse_allocation(std::string_view json_text, int n_nodes, int n_cus);

}  // namespace nocr
