#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scenario.hpp"
#include "solver.hpp"

namespace nocr {

struct VoteResult {
  std::optional<double> output;
  std::vector<int> minority;  // present replicas outside the winning group
  bool quorum_met = false;
};

struct AllocationVote {
  std::optional<std::vector<int>> output;
  std::vector<int> minority;
  bool quorum_met = false;
};

/// Tolerance vote over n replica slots; absent values are crashed or idle
/// replicas. A value joins the lowest-index group all of whose members are
/// within tol of it. Quorum needs ceil((n + 1) / 2) agreeing values; with
/// degraded set a lone present value is accepted as well.
VoteResult majority_vote(const std::vector<std::optional<double>>& values, double tol, bool degraded = false);
VoteResult majority_vote(const std::vector<double>& values, double tol, bool degraded = false);

/// Same rule with exact equality, for decision vectors.
AllocationVote vote_allocations(const std::vector<std::optional<std::vector<int>>>& values,
                                bool degraded = false);

struct PlantState {
  double thrust = 0.0;
  double reference = 1.0;
  double gain_kp = 2.0;
  double command = 0.0;  // in [0, 1]
  bool command_valid = false;
  double time_constant = 0.5;
  double max_thrust = 2.0;
};

PlantState make_plant(const PlantParams& p);

struct ControllerOutcome {
  std::vector<std::optional<double>> values;  // per controller replica
  VoteResult vote;
  PlantState plant;  // command updated on quorum, invalidated otherwise
};

/// One control period: each running replica computes
/// clamp(kp * (reference - thrust), 0, 1); a corrupted replica i adds
/// offset * (1 + i). The voted value becomes the command.
ControllerOutcome controller_step(const PlantState& plant, const std::vector<bool>& running,
                                  const std::vector<bool>& corrupted, double tol, double offset,
                                  bool degraded = false);

/// First-order lag towards command * max_thrust; an invalid command acts as 0.
PlantState plant_step(const PlantState& plant, double dt);

struct AppliedAllocation {
  long long t = 0;
  std::vector<int> x;
  std::size_t violations = 0;  // check_feasible against the model it solved
};

/// Outputs of the allocator replicas in one solve round.
struct ReplicaRound {
  long long t = 0;
  std::vector<std::optional<std::vector<int>>> outputs;
  std::vector<bool> corrupted;
};

struct SimSummary {
  long long ticks = 0;
  std::size_t events = 0;
  int solves = 0;
  int applies = 0;
  int drops = 0;
  int reallocations = 0;
  int failed_votes = 0;
  std::vector<int> running;
  std::vector<int> hosts;
};

/// Discrete-time simulation of the replicated allocators, the controller
/// replicas and the plant. Every tick runs, in order: apply the allocation
/// voted in the previous tick, process scheduled fault events, control,
/// plant update, and a solve round when the known fault state changed.
class Simulator {
 public:
  explicit Simulator(Scenario scenario);

  /// Immediate fault changes, logged at the current tick.
  void inject_fault(int cu, FaultKind kind);
  void recover(int cu, FaultKind kind);

  void step();
  /// Steps until no solve or apply is outstanding, at most max_ticks.
  void settle(int max_ticks = 10);
  void run();

  long long tick() const { return t_; }
  long long end_tick() const { return t_end_; }
  bool finished() const { return t_ > t_end_; }

  const Scenario& scenario() const { return scenario_; }
  const AppRegistry& registry() const { return registry_; }
  const PlatformGraph& graph() const { return graph_; }
  /// Faults as the allocators know them: crashes plus comp faults detected
  /// by voting.
  FaultState known_faults() const;
  const FaultState& true_faults() const { return faults_; }
  const std::optional<Allocation>& allocation() const { return current_; }
  const std::vector<int>& running() const { return running_; }
  const PlantState& plant() const { return plant_; }

  const std::vector<std::string>& trace() const { return trace_; }
  std::string trace_jsonl() const;
  std::string csv() const;
  std::string render_grid() const;
  SimSummary summary() const;
  std::string summary_json() const;

  const std::vector<AppliedAllocation>& applied() const { return applied_; }
  const std::vector<ReplicaRound>& rounds() const { return rounds_; }
  const std::vector<std::optional<double>>& command_history() const { return commands_; }
  const std::vector<double>& thrust_history() const { return thrusts_; }

 private:
  struct Pending {
    std::vector<int> x;
    std::size_t violations = 0;
    std::string objective;
    std::vector<long long> hops;
  };

  void emit(const std::string& kind, const std::string& payload_json);
  void apply_fault(int cu, FaultKind kind, FaultAction action);
  void apply_pending();
  void control();
  void solve_round(bool bootstrap);
  int host_of(int app, int node_in_app) const;

  Scenario scenario_;
  PlatformGraph graph_;
  AppRegistry registry_;
  VarLayout layout_;
  FaultState faults_;
  std::vector<bool> detected_;
  std::optional<Allocation> current_;
  std::vector<int> running_;
  std::optional<Pending> pending_;
  PlantState plant_;
  bool dirty_ = false;
  bool booted_ = false;
  long long t_ = 0;
  long long t_end_ = 0;
  std::size_t next_fault_ = 0;

  std::vector<std::string> trace_;
  std::vector<AppliedAllocation> applied_;
  std::vector<ReplicaRound> rounds_;
  std::vector<std::optional<double>> commands_;
  std::vector<double> thrusts_;
  std::vector<std::string> csv_rows_;
  SimSummary stats_;
};

/// Runs a scenario to completion and returns the JSONL trace.
std::string run_scenario(const Scenario& scenario);

}  // namespace nocr
