#include <queue>
#include <sstream>

#include "solver.hpp"

namespace nocr {

namespace {

struct BfsTree {
  std::vector<int> dist;
  std::vector<int> parent;
  std::vector<int> parent_path;
};

// Breadth-first search over healthy CUs; neighbors are visited in
// ascending index order so parents are deterministic.
BfsTree healthy_bfs(const PlatformGraph& g, const FaultState& f, int source) {
  const auto n = static_cast<std::size_t>(g.n_cus());
  BfsTree t{std::vector<int>(n, -1), std::vector<int>(n, -1), std::vector<int>(n, -1)};
  if (f.faulty[static_cast<std::size_t>(source)]) return t;
  std::queue<int> q;
  t.dist[static_cast<std::size_t>(source)] = 0;
  q.push(source);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const Neighbor& nb : g.neighbors(u)) {
      auto v = static_cast<std::size_t>(nb.cu);
      if (f.faulty[v] || t.dist[v] >= 0) continue;
      t.dist[v] = t.dist[static_cast<std::size_t>(u)] + 1;
      t.parent[v] = u;
      t.parent_path[v] = nb.path;
      q.push(nb.cu);
    }
  }
  return t;
}

bool any_sink(const CommReach& reach) {
  for (bool b : reach.included)
    if (b) return true;
  return false;
}

}  // namespace

std::vector<long long> allocator_host_costs(const ModelContext& ctx) {
  const int n = ctx.graph.n_cus();
  std::vector<long long> cost(static_cast<std::size_t>(n), -1);
  bool sinks = any_sink(ctx.reach);
  for (int h = 0; h < n; ++h) {
    auto uh = static_cast<std::size_t>(h);
    if (ctx.faults.faulty[uh]) continue;
    if (!sinks) {
      cost[uh] = 0;
      continue;
    }
    if (!ctx.reach.included[uh]) continue;
    BfsTree t = healthy_bfs(ctx.graph, ctx.faults, h);
    long long total = 0;
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      if (!ctx.reach.included[static_cast<std::size_t>(j)]) continue;
      int d = t.dist[static_cast<std::size_t>(j)];
      if (d < 0)
        ok = false;
      else
        total += d;
    }
    if (ok) cost[uh] = total;
  }
  return cost;
}

std::optional<FlowResult> solve_flows(const ModelContext& ctx, const Allocation& placement) {
  const PlatformGraph& g = ctx.graph;
  const AppRegistry& reg = ctx.registry;
  if (static_cast<int>(placement.host.size()) != reg.n_nodes())
    throw InvalidArgument("placement length does not match node count");
  const int n_cus = g.n_cus();
  const int n_paths = g.n_paths();
  const std::size_t block = static_cast<std::size_t>(n_cus) * static_cast<std::size_t>(n_paths);

  FlowResult out;
  out.values.assign(block * static_cast<std::size_t>(reg.n_realloc()), 0);
  out.cost.assign(static_cast<std::size_t>(reg.n_realloc()), 0);
  bool sinks = any_sink(ctx.reach);

  for (int k = 0; k < reg.n_realloc(); ++k) {
    int h = placement.host[static_cast<std::size_t>(reg.node_of_alloc(k))];
    if (h < 0 || !sinks) continue;  // dropped replica, or nobody to reach
    if (h >= n_cus) throw InvalidArgument("placement refers to a nonexistent CU");
    if (!ctx.reach.included[static_cast<std::size_t>(h)]) return std::nullopt;
    BfsTree t = healthy_bfs(g, ctx.faults, h);
    for (int j = 0; j < n_cus; ++j) {
      if (!ctx.reach.included[static_cast<std::size_t>(j)] || j == h) continue;
      if (t.dist[static_cast<std::size_t>(j)] < 0) return std::nullopt;
      std::size_t base = static_cast<std::size_t>(k) * block +
                         static_cast<std::size_t>(j) * static_cast<std::size_t>(n_paths);
      for (int v = j; v != h; v = t.parent[static_cast<std::size_t>(v)]) {
        int u = t.parent[static_cast<std::size_t>(v)];
        int p = t.parent_path[static_cast<std::size_t>(v)];
        out.values[base + static_cast<std::size_t>(p)] = g.edge(p).tail == u ? 1 : -1;
      }
      out.cost[static_cast<std::size_t>(k)] += t.dist[static_cast<std::size_t>(j)];
    }
    out.total_cost += out.cost[static_cast<std::size_t>(k)];
  }
  return out;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimedOut: return "timeout";
  }
  return "unknown";
}

std::string Violation::describe(const IlpModel& model) const {
  std::ostringstream s;
  switch (kind) {
    case Kind::Length:
      s << "solution has " << lhs << " entries, layout expects " << rhs;
      break;
    case Kind::Bound:
      s << "bound violated on " << model.layout.name(index) << " = " << lhs;
      break;
    case Kind::Row:
      s << "row R" << index << " violated: lhs " << lhs
        << (model.rows[static_cast<std::size_t>(index)].sense == Sense::Le ? " > " : " != ") << rhs;
      break;
  }
  return s.str();
}

std::vector<Violation> check_feasible(const IlpModel& model, const std::vector<int>& x) {
  std::vector<Violation> out;
  if (x.size() != model.lb.size()) {
    out.push_back({Violation::Kind::Length, 0, static_cast<long long>(x.size()),
                   static_cast<long long>(model.lb.size())});
    return out;
  }
  for (std::size_t v = 0; v < x.size(); ++v)
    if (x[v] < model.lb[v] || x[v] > model.ub[v])
      out.push_back({Violation::Kind::Bound, static_cast<int>(v), x[v], 0});
  for (std::size_t r = 0; r < model.rows.size(); ++r) {
    const Row& row = model.rows[r];
    long long lhs = 0;
    for (const Term& t : row.terms)
      lhs += static_cast<long long>(t.coef) * x[static_cast<std::size_t>(t.var)];
    bool ok = row.sense == Sense::Le ? lhs <= row.rhs : lhs == row.rhs;
    if (!ok) out.push_back({Violation::Kind::Row, static_cast<int>(r), lhs, row.rhs});
  }
  return out;
}

Allocation extract_allocation(const IlpModel& model, const std::vector<int>& x) {
  const VarLayout& L = model.layout;
  Allocation a;
  a.host.assign(static_cast<std::size_t>(L.n_nodes()), -1);
  for (int j = 0; j < L.n_nodes(); ++j)
    for (int i = 0; i < L.n_cus(); ++i)
      if (x.at(static_cast<std::size_t>(L.xcn(i, j))) == 1) {
        a.host[static_cast<std::size_t>(j)] = i;
        break;
      }
  return a;
}

std::vector<int> extract_running(const IlpModel& model, const std::vector<int>& x) {
  std::vector<int> r;
  for (int k = 0; k < model.layout.n_apps(); ++k)
    r.push_back(x.at(static_cast<std::size_t>(model.layout.r(k))));
  return r;
}

std::string dump_solution(const IlpModel& model, const Solution& s) {
  std::ostringstream out;
  out << "status " << to_string(s.status) << '\n';
  if (!s.has_point) return out.str();
  out << "objective " << to_string(s.objective) << '\n';
  for (std::size_t v = 0; v < s.x.size(); ++v)
    if (s.x[v] != 0) out << model.layout.name(static_cast<int>(v)) << " = " << s.x[v] << '\n';
  return out.str();
}

}  // namespace nocr
