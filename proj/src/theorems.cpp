#include "theorems.hpp"

#include <algorithm>
#include <json.hpp>

namespace nocr {

namespace {

TheoremReport fail(std::string name, std::vector<int> index, Wide lhs, Wide rhs, std::string note) {
  return {std::move(name), false, Witness{std::move(index), to_string(lhs), to_string(rhs), std::move(note)}};
}

// suffix[k] = sum of alpha_l for l >= k; suffix[n] = 0.
std::vector<Wide> suffix_sums(const std::vector<Wide>& alpha) {
  std::vector<Wide> s(alpha.size() + 1, 0);
  for (std::size_t k = alpha.size(); k-- > 0;) s[k] = checked_add(s[k + 1], alpha[k]);
  return s;
}

nlohmann::ordered_json report_json(const TheoremReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["holds"] = r.holds;
  if (r.witness) {
    j["witness"] = {{"index", r.witness->index},
                    {"lhs", r.witness->lhs},
                    {"rhs", r.witness->rhs},
                    {"note", r.witness->note}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

}  // namespace

std::string to_json(const TheoremReport& r) { return report_json(r).dump(); }

std::string to_json(const std::vector<TheoremReport>& reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return arr.dump(2);
}

TheoremReport check_theorem_1(const Coefficients& coef, int n_nodes) {
  Wide bound = checked_add(checked_mul(coef.beta + 1, n_nodes), coef.beta);
  for (std::size_t k = 0; k < coef.alpha.size(); ++k)
    if (!(coef.alpha[k] > bound))
      return fail("theorem_1", {static_cast<int>(k) + 1}, coef.alpha[k], bound,
                  "alpha_k > (beta+1)*N_nodes + beta");
  return {"theorem_1", true, std::nullopt};
}

TheoremReport check_theorem_1(const Coefficients& coef, const AppRegistry& reg) {
  return check_theorem_1(coef, reg.n_nodes());
}

TheoremReport check_theorem_2(const Coefficients& coef, std::optional<Wide> move_weight) {
  Wide w = move_weight.value_or(coef.beta + 1);
  if (!(w > coef.beta)) return fail("theorem_2", {}, w, coef.beta, "move weight > beta");
  return {"theorem_2", true, std::nullopt};
}

TheoremReport check_theorem_3(const Coefficients& coef) {
  auto s = suffix_sums(coef.alpha);
  for (std::size_t k = 0; k + 1 < coef.alpha.size(); ++k)
    if (!(coef.alpha[k] > s[k + 1]))
      return fail("theorem_3", {static_cast<int>(k) + 1}, coef.alpha[k], s[k + 1],
                  "alpha_k > sum_{l>k} alpha_l");
  return {"theorem_3", true, std::nullopt};
}

TheoremReport check_lemma_alpha(const Coefficients& coef) {
  const auto& a = coef.alpha;
  auto s = suffix_sums(a);
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!(a[k] > 0)) return fail("lemma_alpha", {static_cast<int>(k) + 1}, a[k], 0, "alpha_k > 0");
  for (std::size_t j = 1; j < a.size(); ++j) {
    if (!(s[j] > 0))
      return fail("lemma_alpha", {static_cast<int>(j) + 1}, s[j], 0, "sum_{k>=j} alpha_k > 0");
    for (std::size_t i = 0; i < j; ++i)
      if (!(a[i] > s[j]))
        return fail("lemma_alpha", {static_cast<int>(i) + 1, static_cast<int>(j) + 1}, a[i], s[j],
                    "alpha_i > sum_{k>=j} alpha_k");
  }
  return {"lemma_alpha", true, std::nullopt};
}

TheoremReport check_fact_nnodes(const std::vector<int>& nodes, int n_nodes) {
  Wide suffix = 0;
  for (std::size_t j = nodes.size(); j-- > 0;) {
    int rank = static_cast<int>(j) + 1;
    suffix = checked_add(suffix, nodes[j]);
    if (!(nodes[j] > 0)) return fail("fact_nnodes", {rank}, nodes[j], 0, "N^j_nodes > 0");
    if (!(suffix >= nodes[j]))
      return fail("fact_nnodes", {rank}, suffix, nodes[j], "sum_{i>=j} N^i_nodes >= N^j_nodes");
    if (!(n_nodes >= suffix))
      return fail("fact_nnodes", {rank}, n_nodes, suffix, "N_nodes >= sum_{i>=j} N^i_nodes");
  }
  return {"fact_nnodes", true, std::nullopt};
}

TheoremReport check_fact_nnodes(const AppRegistry& reg) {
  std::vector<int> nodes;
  for (int k = 0; k < reg.n_apps(); ++k) nodes.push_back(reg.n_nodes_of(k));
  return check_fact_nnodes(nodes, reg.n_nodes());
}

std::vector<TheoremReport> check_all(const Coefficients& coef, const AppRegistry& reg) {
  return {check_theorem_1(coef, reg), check_theorem_2(coef), check_theorem_3(coef),
          check_lemma_alpha(coef), check_fact_nnodes(reg)};
}

TheoremReport priority_drop_experiment(const PlatformGraph& g, const AppRegistry& reg,
                                       const std::vector<FaultState>& fault_sets, const BuildOptions& opts,
                                       const SolverConfig& cfg) {
  for (std::size_t s = 0; s < fault_sets.size(); ++s) {
    IlpModel m = build_model(g, reg, fault_sets[s], std::nullopt, opts);
    Solution sol = solve(m, cfg);
    auto sets = feasible_executable_sets(m, cfg);
    auto encode = [](const std::vector<int>& r) {
      std::string out;
      for (int b : r) out += static_cast<char>('0' + b);
      return out;
    };
    if (sol.status != SolveStatus::Optimal || sets.empty()) {
      bool both_infeasible = sol.status == SolveStatus::Infeasible && sets.empty();
      if (both_infeasible) continue;
      return {"priority_drop", false,
              Witness{{static_cast<int>(s)}, to_string(sol.status), std::to_string(sets.size()),
                      "solver status vs number of feasible executable sets"}};
    }
    // Lexicographic order on r with rank 1 first is exactly priority order.
    const std::vector<int>& best = *std::max_element(sets.begin(), sets.end());
    std::vector<int> got = extract_running(m, sol.x);
    if (got != best)
      return {"priority_drop", false,
              Witness{{static_cast<int>(s)}, encode(got), encode(best),
                      "solver executable set vs lexicographic maximum"}};
  }
  return {"priority_drop", true, std::nullopt};
}

CrossCheck cross_check_solver(const PlatformGraph& g, const AppRegistry& reg, int max_faults,
                              const BuildOptions& opts, const SolverConfig& cfg) {
  if (max_faults < 0) throw InvalidArgument("max_faults must be >= 0");
  {
    IlpModel probe = build_model(g, reg, FaultState::healthy(g.n_cus()), std::nullopt, opts);
    int n = oracle_variable_count(probe);
    if (n > cfg.oracle_var_limit)
      throw OversizeError("model has " + std::to_string(n) + " enumerated variables, oracle limit is " +
                          std::to_string(cfg.oracle_var_limit));
  }
  CrossCheck out;
  auto sets = fault_subsets(g.n_cus(), std::min(max_faults, g.n_cus()));
  for (const FaultState& f : sets) {
    ++out.cases;
    IlpModel m = build_model(g, reg, f, std::nullopt, opts);
    Solution a = solve(m, cfg);
    Solution b = brute_force(m, cfg);
    std::string why;
    if (a.status != b.status) {
      why = "status " + to_string(a.status) + " vs oracle " + to_string(b.status);
    } else if (a.status == SolveStatus::Optimal) {
      auto feasible = feasible_executable_sets(m, cfg);
      if (a.objective != b.objective)
        why = "objective " + to_string(a.objective) + " vs oracle " + to_string(b.objective);
      else if (feasible.empty() || extract_running(m, a.x) != *std::max_element(feasible.begin(), feasible.end()))
        why = "executed set is not the priority-lexicographic maximum";
    }
    if (why.empty()) continue;
    ++out.mismatches;
    if (out.first_failure.empty()) {
      std::string cus;
      for (int c = 0; c < g.n_cus(); ++c)
        if (f.faulty[static_cast<std::size_t>(c)]) cus += (cus.empty() ? "" : ",") + std::to_string(c);
      out.first_failure = "faults {" + cus + "}: " + why;
    }
  }
  return out;
}

std::vector<FaultState> fault_subsets(int n_cus, int max_faults) {
  std::vector<FaultState> out;
  std::vector<int> pick;
  auto emit = [&] {
    FaultState f = FaultState::healthy(n_cus);
    for (int c : pick) f.faulty[static_cast<std::size_t>(c)] = true;
    out.push_back(std::move(f));
  };
  // Depth-first over increasing CU indices.
  auto rec = [&](auto&& self, int start) -> void {
    emit();
    if (static_cast<int>(pick.size()) == max_faults) return;
    for (int c = start; c < n_cus; ++c) {
      pick.push_back(c);
      self(self, c + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace nocr
