#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ilp.hpp"

namespace nocr {

enum class SolveStatus { Optimal, Infeasible, TimedOut };

std::string to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  /// Full decision vector; meaningful when has_point is set. On TimedOut it
  /// holds the incumbent, if any.
  std::vector<int> x;
  bool has_point = false;
  Wide objective = 0;
  long long nodes = 0;

  bool operator==(const Solution& o) const {
    return status == o.status && x == o.x && has_point == o.has_point &&
           objective == o.objective;
  }
};

struct SolverConfig {
  long long timeout_ms = 60000;
  long long node_limit = 20000000;
  int oracle_var_limit = 64;
};

/// Exact solve. Branches on r in priority order, then on node placements,
/// then on link and move variables; communication flows are never branched
/// but completed as shortest paths once the placement is fixed.
/// Deterministic for identical inputs.
Solution solve(const IlpModel& model, const SolverConfig& cfg = {});

/// Signed broadcast flows of every allocator replica, laid out like the
/// X^{Comm} block of the decision vector.
struct FlowResult {
  std::vector<int> values;
  std::vector<long long> cost;  // per replica
  long long total_cost = 0;
};

/// Completes the communication variables for a placement: for every
/// running allocator and every sink CU, the BFS shortest path in the
/// healthy subgraph (lowest-index neighbor first). Returns nullopt when the
/// placement cannot satisfy the broadcast constraints.
std::optional<FlowResult> solve_flows(const ModelContext& ctx, const Allocation& placement);

/// Broadcast cost of hosting an allocator on each CU: the sum of hop
/// distances to all sinks, or -1 when some sink is unreachable from it.
std::vector<long long> allocator_host_costs(const ModelContext& ctx);

/// Exhaustive oracle over assignment, link, execution and move variables,
/// with flows completed by solve_flows. Returns the best point, ties broken
/// by the lexicographically smallest x.
Solution brute_force(const IlpModel& model, const SolverConfig& cfg = {});

/// Every execution vector r for which the model has a feasible point,
/// enumerated exhaustively. Sorted lexicographically.
std::vector<std::vector<int>> feasible_executable_sets(const IlpModel& model,
                                                       const SolverConfig& cfg = {});

/// Variables the oracle enumerates (everything except communication).
int oracle_variable_count(const IlpModel& model);

struct Violation {
  enum class Kind { Length, Bound, Row } kind = Kind::Row;
  int index = 0;  // variable or row index
  long long lhs = 0;
  long long rhs = 0;
  std::string describe(const IlpModel& model) const;
};

std::vector<Violation> check_feasible(const IlpModel& model, const std::vector<int>& x);

Allocation extract_allocation(const IlpModel& model, const std::vector<int>& x);
std::vector<int> extract_running(const IlpModel& model, const std::vector<int>& x);

/// "name = value" for every nonzero variable.
std::string dump_solution(const IlpModel& model, const Solution& s);

}  // namespace nocr
