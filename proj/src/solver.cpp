#include "solver.hpp"

#include <algorithm>
#include <chrono>
#include <deque>

namespace nocr {

namespace {

struct Domain {
  std::vector<int> lb;
  std::vector<int> ub;

  bool fixed(int v) const {
    return lb[static_cast<std::size_t>(v)] == ub[static_cast<std::size_t>(v)];
  }
};

// Depth-first branch and bound over the assignment, link, execution and
// move variables. Communication variables are completed at the leaves.
class BranchAndBound {
 public:
  BranchAndBound(const IlpModel& m, const SolverConfig& cfg)
      : m_(m), ctx_(*m.context), L_(m.layout), cfg_(cfg), n_struct_(m.layout.comm_offset()),
        start_(std::chrono::steady_clock::now()) {
    var_rows_.resize(static_cast<std::size_t>(n_struct_));
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      bool structural = std::all_of(m.rows[r].terms.begin(), m.rows[r].terms.end(),
                                    [&](const Term& t) { return t.var < n_struct_; });
      if (!structural) continue;
      int id = static_cast<int>(struct_rows_.size());
      struct_rows_.push_back(static_cast<int>(r));
      for (const Term& t : m.rows[r].terms) var_rows_[static_cast<std::size_t>(t.var)].push_back(id);
    }
    host_cost_ = allocator_host_costs(ctx_);
    old_host_.assign(static_cast<std::size_t>(L_.n_nodes()), -1);
    if (ctx_.x_old) old_host_ = Allocation::from_matrix(*ctx_.x_old).host;
    is_alloc_node_.assign(static_cast<std::size_t>(L_.n_nodes()), false);
    for (int k = 0; k < L_.n_realloc(); ++k)
      is_alloc_node_[static_cast<std::size_t>(ctx_.registry.node_of_alloc(k))] = true;
  }

  Solution run() {
    Domain root;
    root.lb.assign(m_.lb.begin(), m_.lb.begin() + n_struct_);
    root.ub.assign(m_.ub.begin(), m_.ub.begin() + n_struct_);
    std::vector<int> changed;
    bool ok = true;
    // Hosts from which some sink cannot be reached cannot run an allocator.
    for (int k = 0; k < L_.n_realloc() && ok; ++k) {
      int a = ctx_.registry.node_of_alloc(k);
      for (int c = 0; c < L_.n_cus() && ok; ++c)
        if (host_cost_[static_cast<std::size_t>(c)] < 0) ok = set_ub(root, L_.xcn(c, a), 0, changed);
    }
    if (ok) {
      std::vector<int> all(struct_rows_.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
      ok = propagate(root, all);
    }
    if (ok) dfs(std::move(root));

    Solution s;
    s.nodes = nodes_;
    s.has_point = has_best_;
    if (has_best_) {
      s.x = best_x_;
      s.objective = best_obj_;
    }
    if (stopped_)
      s.status = SolveStatus::TimedOut;
    else
      s.status = has_best_ ? SolveStatus::Optimal : SolveStatus::Infeasible;
    return s;
  }

 private:
  bool set_lb(Domain& d, int v, int value, std::vector<int>& changed) {
    auto uv = static_cast<std::size_t>(v);
    if (value <= d.lb[uv]) return true;
    d.lb[uv] = value;
    changed.push_back(v);
    return d.lb[uv] <= d.ub[uv];
  }

  bool set_ub(Domain& d, int v, int value, std::vector<int>& changed) {
    auto uv = static_cast<std::size_t>(v);
    if (value >= d.ub[uv]) return true;
    d.ub[uv] = value;
    changed.push_back(v);
    return d.lb[uv] <= d.ub[uv];
  }

  // Bound propagation on one row; false on proven infeasibility.
  bool propagate_row(Domain& d, int id, std::vector<int>& changed) {
    const Row& row = m_.rows[static_cast<std::size_t>(struct_rows_[static_cast<std::size_t>(id)])];
    long long min_act = 0;
    long long max_act = 0;
    for (const Term& t : row.terms) {
      long long lo = d.lb[static_cast<std::size_t>(t.var)];
      long long hi = d.ub[static_cast<std::size_t>(t.var)];
      min_act += t.coef > 0 ? t.coef * lo : t.coef * hi;
      max_act += t.coef > 0 ? t.coef * hi : t.coef * lo;
    }
    if (min_act > row.rhs) return false;
    if (row.sense == Sense::Eq && max_act < row.rhs) return false;
    long long slack_up = row.rhs - min_act;
    long long slack_down = max_act - row.rhs;
    for (const Term& t : row.terms) {
      auto uv = static_cast<std::size_t>(t.var);
      long long range = d.ub[uv] - d.lb[uv];
      if (range == 0) continue;
      long long a = t.coef;
      long long mag = a > 0 ? a : -a;
      if (mag * range > slack_up) {
        long long step = slack_up / mag;
        if (a > 0 ? !set_ub(d, t.var, static_cast<int>(d.lb[uv] + step), changed)
                  : !set_lb(d, t.var, static_cast<int>(d.ub[uv] - step), changed))
          return false;
      }
      if (row.sense == Sense::Eq) {
        range = d.ub[uv] - d.lb[uv];
        if (range > 0 && mag * range > slack_down) {
          long long step = slack_down / mag;
          if (a > 0 ? !set_lb(d, t.var, static_cast<int>(d.ub[uv] - step), changed)
                    : !set_ub(d, t.var, static_cast<int>(d.lb[uv] + step), changed))
            return false;
        }
      }
    }
    return true;
  }

  // Each end of a running application link needs an adjacent CU, reachable
  // through a still-available physical link, that can host the other end.
  bool link_support(Domain& d, std::vector<int>& changed) {
    const AppRegistry& reg = ctx_.registry;
    for (int l = 0; l < L_.n_links(); ++l) {
      if (d.lb[static_cast<std::size_t>(L_.r(reg.link_app(l)))] != 1) continue;
      auto [u, v] = reg.link_ends(l);
      for (int side = 0; side < 2; ++side) {
        int x = side == 0 ? u : v;
        int y = side == 0 ? v : u;
        for (int c = 0; c < L_.n_cus(); ++c) {
          if (d.ub[static_cast<std::size_t>(L_.xcn(c, x))] == 0) continue;
          bool supported = false;
          for (const Neighbor& nb : ctx_.graph.neighbors(c))
            if (d.ub[static_cast<std::size_t>(L_.xcn(nb.cu, y))] == 1 &&
                d.ub[static_cast<std::size_t>(L_.xpl(nb.path, l))] == 1) {
              supported = true;
              break;
            }
          if (!supported && !set_ub(d, L_.xcn(c, x), 0, changed)) return false;
        }
      }
    }
    return true;
  }

  int fixed_host(const Domain& d, int node) const {
    for (int c = 0; c < L_.n_cus(); ++c)
      if (d.lb[static_cast<std::size_t>(L_.xcn(c, node))] == 1) return c;
    return -1;
  }

  // Running nodes that are not placed yet must fit on distinct CUs.
  bool matching_feasible(const Domain& d) const {
    std::vector<std::vector<int>> options;
    for (int j = 0; j < L_.n_nodes(); ++j) {
      if (d.lb[static_cast<std::size_t>(L_.r(ctx_.registry.node_app(j)))] != 1) continue;
      if (fixed_host(d, j) >= 0) continue;
      std::vector<int> opts;
      for (int c = 0; c < L_.n_cus(); ++c)
        if (d.ub[static_cast<std::size_t>(L_.xcn(c, j))] == 1) opts.push_back(c);
      if (opts.empty()) return false;
      options.push_back(std::move(opts));
    }
    std::vector<int> owner(static_cast<std::size_t>(L_.n_cus()), -1);
    for (int n = 0; n < static_cast<int>(options.size()); ++n) {
      std::vector<char> seen(static_cast<std::size_t>(L_.n_cus()), 0);
      if (!augment(n, options, owner, seen)) return false;
    }
    return true;
  }

  static bool augment(int n, const std::vector<std::vector<int>>& options, std::vector<int>& owner,
                      std::vector<char>& seen) {
    for (int c : options[static_cast<std::size_t>(n)]) {
      auto uc = static_cast<std::size_t>(c);
      if (seen[uc]) continue;
      seen[uc] = 1;
      if (owner[uc] < 0 || augment(owner[uc], options, owner, seen)) {
        owner[uc] = n;
        return true;
      }
    }
    return false;
  }

  bool propagate(Domain& d, std::vector<int> queue_ids) {
    std::vector<char> queued(struct_rows_.size(), 0);
    std::deque<int> queue;
    for (int id : queue_ids)
      if (!queued[static_cast<std::size_t>(id)]) {
        queued[static_cast<std::size_t>(id)] = 1;
        queue.push_back(id);
      }
    std::vector<int> changed;
    auto enqueue_changed = [&] {
      for (int v : changed)
        for (int id : var_rows_[static_cast<std::size_t>(v)])
          if (!queued[static_cast<std::size_t>(id)]) {
            queued[static_cast<std::size_t>(id)] = 1;
            queue.push_back(id);
          }
      changed.clear();
    };
    while (true) {
      while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        queued[static_cast<std::size_t>(id)] = 0;
        if (!propagate_row(d, id, changed)) return false;
        enqueue_changed();
      }
      if (!link_support(d, changed)) return false;
      if (changed.empty()) break;
      enqueue_changed();
    }
    return matching_feasible(d);
  }

  bool propagate_var(Domain& d, int v) {
    return propagate(d, var_rows_[static_cast<std::size_t>(v)]);
  }

  Wide upper_bound(const Domain& d) const {
    const AppRegistry& reg = ctx_.registry;
    Wide bound = 0;
    for (int k = 0; k < L_.n_apps(); ++k)
      if (d.ub[static_cast<std::size_t>(L_.r(k))] == 1) bound += m_.coef.alpha[static_cast<std::size_t>(k)];
    for (int j = 0; j < L_.n_nodes(); ++j)
      if (d.lb[static_cast<std::size_t>(L_.m(j))] == 1) bound -= m_.coef.beta + 1;

    long long flow = 0;
    std::vector<int> unplaced;
    for (int k = 0; k < L_.n_realloc(); ++k) {
      if (d.lb[static_cast<std::size_t>(L_.r(reg.allocator_app(k)))] != 1) continue;
      int a = reg.node_of_alloc(k);
      int h = fixed_host(d, a);
      if (h >= 0)
        flow += std::max(0LL, host_cost_[static_cast<std::size_t>(h)]);
      else
        unplaced.push_back(a);
    }
    if (!unplaced.empty()) {
      long long individual = 0;
      std::vector<long long> pool;
      std::vector<char> in_pool(static_cast<std::size_t>(L_.n_cus()), 0);
      for (int a : unplaced) {
        long long best = -1;
        for (int c = 0; c < L_.n_cus(); ++c) {
          if (d.ub[static_cast<std::size_t>(L_.xcn(c, a))] == 0) continue;
          long long hc = std::max(0LL, host_cost_[static_cast<std::size_t>(c)]);
          if (best < 0 || hc < best) best = hc;
          if (!in_pool[static_cast<std::size_t>(c)]) {
            in_pool[static_cast<std::size_t>(c)] = 1;
            pool.push_back(hc);
          }
        }
        individual += std::max(0LL, best);
      }
      std::sort(pool.begin(), pool.end());
      long long joint = 0;
      for (std::size_t i = 0; i < pool.size() && i < unplaced.size(); ++i) joint += pool[i];
      flow += std::max(individual, joint);
    }
    return bound - flow;
  }

  bool out_of_budget() {
    ++nodes_;
    if (nodes_ > cfg_.node_limit) stopped_ = true;
    if ((nodes_ & 255) == 0) {
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start_)
                         .count();
      if (elapsed > cfg_.timeout_ms) stopped_ = true;
    }
    return stopped_;
  }

  void try_value(const Domain& d, int v, int value) {
    Domain child = d;
    std::vector<int> changed;
    if (!set_lb(child, v, value, changed) || !set_ub(child, v, value, changed)) return;
    if (propagate_var(child, v)) dfs(std::move(child));
  }

  void dfs(Domain d) {
    if (stopped_ || out_of_budget()) return;
    if (has_best_ && upper_bound(d) <= best_obj_) return;

    // Execution variables, highest priority first, running before dropped.
    for (int k = 0; k < L_.n_apps(); ++k) {
      int v = L_.r(k);
      if (d.fixed(v)) continue;
      try_value(d, v, 1);
      try_value(d, v, 0);
      return;
    }

    // Node placements in layout order.
    for (int j = 0; j < L_.n_nodes(); ++j) {
      if (fixed_host(d, j) >= 0) continue;
      std::vector<int> cands;
      for (int c = 0; c < L_.n_cus(); ++c)
        if (!d.fixed(L_.xcn(c, j))) cands.push_back(c);
      if (cands.empty()) continue;
      int old = old_host_[static_cast<std::size_t>(j)];
      bool alloc = is_alloc_node_[static_cast<std::size_t>(j)];
      auto key = [&](int c) {
        long long cost = alloc ? host_cost_[static_cast<std::size_t>(c)] : 0;
        return std::tuple<int, long long, int>(c == old ? 0 : 1, cost, c);
      };
      std::stable_sort(cands.begin(), cands.end(), [&](int a, int b) { return key(a) < key(b); });
      for (int c : cands) {
        if (stopped_) return;
        try_value(d, L_.xcn(c, j), 1);
      }
      return;
    }

    for (int v = L_.xpl_offset(); v < L_.r_offset(); ++v) {
      if (d.fixed(v)) continue;
      try_value(d, v, 1);
      try_value(d, v, 0);
      return;
    }
    for (int v = L_.m_offset(); v < n_struct_; ++v) {
      if (d.fixed(v)) continue;
      try_value(d, v, 0);
      try_value(d, v, 1);
      return;
    }
    for (int v = 0; v < n_struct_; ++v) {
      if (d.fixed(v)) continue;
      for (int val = d.lb[static_cast<std::size_t>(v)]; val <= d.ub[static_cast<std::size_t>(v)]; ++val)
        try_value(d, v, val);
      return;
    }
    evaluate_leaf(d);
  }

  void evaluate_leaf(const Domain& d) {
    std::vector<int> x(static_cast<std::size_t>(L_.total()), 0);
    std::copy(d.lb.begin(), d.lb.end(), x.begin());
    Allocation placement = extract_allocation(m_, x);
    auto flows = solve_flows(ctx_, placement);
    if (!flows) return;
    std::copy(flows->values.begin(), flows->values.end(), x.begin() + L_.comm_offset());
    for (std::size_t i = 0; i < flows->values.size(); ++i)
      x[static_cast<std::size_t>(L_.hat_offset()) + i] = flows->values[i] < 0 ? -flows->values[i] : flows->values[i];
    auto violations = check_feasible(m_, x);
    if (!violations.empty()) {
      log(LogLevel::Debug, "solver leaf rejected: " + violations.front().describe(m_));
      return;
    }
    Wide obj = evaluate_objective(m_, x);
    if (!has_best_ || obj > best_obj_) {
      has_best_ = true;
      best_obj_ = obj;
      best_x_ = std::move(x);
      log(LogLevel::Debug, "incumbent " + to_string(obj) + " after " + std::to_string(nodes_) + " nodes");
    }
  }

  const IlpModel& m_;
  const ModelContext& ctx_;
  const VarLayout& L_;
  SolverConfig cfg_;
  int n_struct_;
  std::chrono::steady_clock::time_point start_;

  std::vector<int> struct_rows_;
  std::vector<std::vector<int>> var_rows_;
  std::vector<long long> host_cost_;
  std::vector<int> old_host_;
  std::vector<bool> is_alloc_node_;

  long long nodes_ = 0;
  bool stopped_ = false;
  bool has_best_ = false;
  Wide best_obj_ = 0;
  std::vector<int> best_x_;
};

}  // namespace

Solution solve(const IlpModel& model, const SolverConfig& cfg) {
  if (!model.context) throw InvalidArgument("model has no context");
  if (cfg.timeout_ms <= 0 || cfg.node_limit <= 0)
    throw InvalidArgument("solver limits must be positive");
  BranchAndBound search(model, cfg);
  Solution s = search.run();
  if (log_level() >= LogLevel::Info)
    log(LogLevel::Info, "solve: " + to_string(s.status) + ", objective " + to_string(s.objective) + ", " +
                            std::to_string(s.nodes) + " nodes");
  return s;
}

}  // namespace nocr
