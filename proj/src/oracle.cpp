#include <set>

#include "solver.hpp"

namespace nocr {

namespace {

// Plain backtracking over every non-communication variable. Pruning uses
// only row interval checks, so agreement with solve() is meaningful.
class Enumerator {
 public:
  Enumerator(const IlpModel& m, bool one_per_r) : m_(m), L_(m.layout), one_per_r_(one_per_r) {
    const int n = L_.comm_offset();
    // Execution variables first so that one_per_r can cut whole subtrees.
    for (int k = 0; k < L_.n_apps(); ++k) order_.push_back(L_.r(k));
    for (int v = 0; v < n; ++v)
      if (v < L_.r_offset() || v >= L_.m_offset()) order_.push_back(v);
    var_rows_.resize(static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      bool structural = true;
      for (const Term& t : m.rows[r].terms) structural = structural && t.var < n;
      if (!structural) continue;
      for (const Term& t : m.rows[r].terms)
        var_rows_[static_cast<std::size_t>(t.var)].push_back(static_cast<int>(r));
    }
    value_.assign(static_cast<std::size_t>(n), 0);
    assigned_.assign(static_cast<std::size_t>(n), false);
  }

  void run() { recurse(0); }

  bool has_best = false;
  Wide best_obj = 0;
  std::vector<int> best_x;
  std::set<std::vector<int>> feasible_r;

 private:
  bool row_possible(int r) const {
    const Row& row = m_.rows[static_cast<std::size_t>(r)];
    long long lo = 0;
    long long hi = 0;
    for (const Term& t : row.terms) {
      auto v = static_cast<std::size_t>(t.var);
      long long a = assigned_[v] ? value_[v] : m_.lb[v];
      long long b = assigned_[v] ? value_[v] : m_.ub[v];
      lo += t.coef > 0 ? t.coef * a : t.coef * b;
      hi += t.coef > 0 ? t.coef * b : t.coef * a;
    }
    return row.sense == Sense::Le ? lo <= row.rhs : (lo <= row.rhs && row.rhs <= hi);
  }

  std::vector<int> current_r() const {
    std::vector<int> r;
    for (int k = 0; k < L_.n_apps(); ++k) r.push_back(value_[static_cast<std::size_t>(L_.r(k))]);
    return r;
  }

  // Returns true when the caller should stop exploring the current r.
  bool recurse(std::size_t depth) {
    if (one_per_r_ && depth == static_cast<std::size_t>(L_.n_apps()) && feasible_r.count(current_r()))
      return false;
    if (depth == order_.size()) return leaf();
    int v = order_[depth];
    auto uv = static_cast<std::size_t>(v);
    for (int val = m_.lb[uv]; val <= m_.ub[uv]; ++val) {
      value_[uv] = val;
      assigned_[uv] = true;
      bool ok = true;
      for (int r : var_rows_[uv])
        if (!row_possible(r)) {
          ok = false;
          break;
        }
      bool stop = ok && recurse(depth + 1);
      assigned_[uv] = false;
      value_[uv] = 0;
      if (stop && depth >= static_cast<std::size_t>(L_.n_apps())) return true;
    }
    return false;
  }

  bool leaf() {
    std::vector<int> x(static_cast<std::size_t>(L_.total()), 0);
    std::copy(value_.begin(), value_.end(), x.begin());
    auto flows = solve_flows(*m_.context, extract_allocation(m_, x));
    if (!flows) return false;
    for (std::size_t i = 0; i < flows->values.size(); ++i) {
      int f = flows->values[i];
      x[static_cast<std::size_t>(L_.comm_offset()) + i] = f;
      x[static_cast<std::size_t>(L_.hat_offset()) + i] = f < 0 ? -f : f;
    }
    if (!check_feasible(m_, x).empty()) return false;
    feasible_r.insert(current_r());
    Wide obj = evaluate_objective(m_, x);
    if (!has_best || obj > best_obj || (obj == best_obj && x < best_x)) {
      has_best = true;
      best_obj = obj;
      best_x = std::move(x);
    }
    return one_per_r_;
  }

  const IlpModel& m_;
  const VarLayout& L_;
  bool one_per_r_;
  std::vector<int> order_;
  std::vector<std::vector<int>> var_rows_;
  std::vector<int> value_;
  std::vector<bool> assigned_;
};

void check_size(const IlpModel& model, const SolverConfig& cfg) {
  if (!model.context) throw InvalidArgument("model has no context");
  int n = oracle_variable_count(model);
  if (n > cfg.oracle_var_limit)
    throw OversizeError("oracle refuses model with " + std::to_string(n) + " enumerated variables (limit " +
                        std::to_string(cfg.oracle_var_limit) + ")");
}

}  // namespace

int oracle_variable_count(const IlpModel& model) { return model.layout.comm_offset(); }

Solution brute_force(const IlpModel& model, const SolverConfig& cfg) {
  check_size(model, cfg);
  Enumerator e(model, false);
  e.run();
  Solution s;
  s.has_point = e.has_best;
  s.status = e.has_best ? SolveStatus::Optimal : SolveStatus::Infeasible;
  if (e.has_best) {
    s.x = std::move(e.best_x);
    s.objective = e.best_obj;
  }
  return s;
}

std::vector<std::vector<int>> feasible_executable_sets(const IlpModel& model, const SolverConfig& cfg) {
  check_size(model, cfg);
  Enumerator e(model, true);
  e.run();
  return {e.feasible_r.begin(), e.feasible_r.end()};
}

}  // namespace nocr
