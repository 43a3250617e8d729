#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ilp.hpp"
#include "solver.hpp"

namespace nocr {

/// The violated inequality lhs > rhs, with both sides as exact decimals.
/// Indices are 1-based priority ranks, or a fault-set index for the
/// experiment.
struct Witness {
  std::vector<int> index;
  std::string lhs;
  std::string rhs;
  std::string note;
};

struct TheoremReport {
  std::string name;
  bool holds = true;
  std::optional<Witness> witness;  // present iff !holds
};

std::string to_json(const TheoremReport& r);
std::string to_json(const std::vector<TheoremReport>& reports);

/// alpha_k > (beta + 1) * n_nodes + beta for every k.
TheoremReport check_theorem_1(const Coefficients& coef, int n_nodes);
TheoremReport check_theorem_1(const Coefficients& coef, const AppRegistry& reg);

/// A single move outweighs every path hop: move_weight > beta.
/// The weight defaults to beta + 1, the one the objective uses.
TheoremReport check_theorem_2(const Coefficients& coef, std::optional<Wide> move_weight = std::nullopt);

/// alpha_k > sum of alpha_l over l > k.
TheoremReport check_theorem_3(const Coefficients& coef);

/// alpha_i > sum_{k >= j} alpha_k > 0 for all i < j, and every alpha_k > 0.
TheoremReport check_lemma_alpha(const Coefficients& coef);

/// n_nodes >= sum_{i >= j} nodes_i >= nodes_j > 0 for every j.
TheoremReport check_fact_nnodes(const std::vector<int>& nodes_per_app, int n_nodes);
TheoremReport check_fact_nnodes(const AppRegistry& reg);

/// The five symbolic checks for one set of coefficients.
std::vector<TheoremReport> check_all(const Coefficients& coef, const AppRegistry& reg);

/// For every fault set, the solver's executed-application set must be the
/// priority-lexicographic maximum of all feasible executable sets, which
/// the oracle enumerates. Throws OversizeError when a model is too large.
TheoremReport priority_drop_experiment(const PlatformGraph& g, const AppRegistry& reg,
                                       const std::vector<FaultState>& fault_sets,
                                       const BuildOptions& opts = {}, const SolverConfig& cfg = {});

/// Every fault set with at most max_faults crashed CUs, in lexicographic
/// order of the sorted CU lists, starting with the empty set.
std::vector<FaultState> fault_subsets(int n_cus, int max_faults);

/// Result of comparing solve against the oracle over fault sweeps.
struct CrossCheck {
  int cases = 0;
  int mismatches = 0;
  std::string first_failure;  // empty when passed
  bool passed() const { return mismatches == 0; }
};

/// For every crash-fault subset of size <= max_faults: solve and
/// brute_force agree on status and objective, and the solver's executed
/// set is the lexicographic maximum of the feasible executable sets.
/// Throws OversizeError before doing any work if the model is too large.
CrossCheck cross_check_solver(const PlatformGraph& g, const AppRegistry& reg, int max_faults,
                              const BuildOptions& opts = {}, const SolverConfig& cfg = {});

}  // namespace nocr
