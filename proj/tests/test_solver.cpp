#include <doctest.h>

#include "solver.hpp"
#include "support.hpp"
#include "theorems.hpp"

using namespace nocr;
using testsupport::faults;

namespace {

AppSpec allocator(const std::string& name, int rank) {
  AppSpec a = AppSpec::grid(name, rank, 1, 1);
  a.is_allocator = true;
  a.allocator_node = 0;
  return a;
}

// Column j of the flow block of replica k, as a map path -> value.
std::vector<int> flow_column(const FlowResult& f, const PlatformGraph& g, int k, int sink) {
  std::vector<int> col;
  const std::size_t base = (static_cast<std::size_t>(k) * static_cast<std::size_t>(g.n_cus()) +
                            static_cast<std::size_t>(sink)) *
                           static_cast<std::size_t>(g.n_paths());
  for (int p = 0; p < g.n_paths(); ++p) col.push_back(f.values[base + static_cast<std::size_t>(p)]);
  return col;
}

}  // namespace

TEST_CASE("broadcast from the centre of a 3x3 mesh costs 12 hops") {
  auto ctx = make_context(build_mesh(3, 3, false), AppRegistry({allocator("a", 1)}), FaultState::healthy(9),
                          std::nullopt, {});
  auto costs = allocator_host_costs(*ctx);
  CHECK(costs[4] == 12);
  CHECK(costs[0] == 18);
  Allocation place;
  place.host = {4};
  auto f = solve_flows(*ctx, place);
  REQUIRE(f);
  CHECK(f->total_cost == 12);
  CHECK(flow_column(*f, ctx->graph, 0, 4) == std::vector<int>(12, 0));
}

TEST_CASE("flows on a path graph carry the orientation of the links") {
  auto ctx = make_context(build_mesh(1, 3, false), AppRegistry({allocator("a", 1)}), FaultState::healthy(3),
                          std::nullopt, {});
  Allocation place;
  place.host = {0};
  auto f = solve_flows(*ctx, place);
  REQUIRE(f);
  CHECK(flow_column(*f, ctx->graph, 0, 2) == std::vector<int>{1, 1});
  CHECK(flow_column(*f, ctx->graph, 0, 1) == std::vector<int>{1, 0});
  CHECK(flow_column(*f, ctx->graph, 0, 0) == std::vector<int>{0, 0});
  place.host = {2};
  f = solve_flows(*ctx, place);
  REQUIRE(f);
  CHECK(flow_column(*f, ctx->graph, 0, 0) == std::vector<int>{-1, -1});
  CHECK(f->total_cost == 3);
}

TEST_CASE("host costs agree with Floyd-Warshall distances") {
  for (auto fs : {FaultState::healthy(16), faults(16, {5}), faults(16, {1, 4, 6, 9}), faults(16, {2, 6, 10, 14})}) {
    auto g = build_mesh(4, 4, false);
    auto ctx = make_context(g, AppRegistry({allocator("a", 1)}), fs, std::nullopt, {});
    auto d = testsupport::healthy_distances(g, fs);
    auto costs = allocator_host_costs(*ctx);
    for (int h = 0; h < 16; ++h) {
      auto uh = static_cast<std::size_t>(h);
      if (!ctx->reach.included[uh]) {
        CHECK(costs[uh] == -1);
        continue;
      }
      long long sum = 0;
      bool reachable = true;
      for (int j = 0; j < 16; ++j) {
        if (!ctx->reach.included[static_cast<std::size_t>(j)]) continue;
        int dj = d[uh][static_cast<std::size_t>(j)];
        if (dj < 0) reachable = false;
        sum += dj;
      }
      CHECK(costs[uh] == (reachable ? sum : -1));
    }
  }
}

TEST_CASE("an application too large for the platform is dropped") {
  auto g = build_mesh(2, 2, false);
  AppRegistry reg({AppSpec::grid("A", 1, 1, 5), AppSpec::grid("B", 2, 1, 2), AppSpec::grid("C", 3, 1, 1)});
  IlpModel m = build_model(g, reg, FaultState::healthy(4), std::nullopt, {});
  Solution s = solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(extract_running(m, s.x) == std::vector<int>{0, 1, 1});
  CHECK(check_feasible(m, s.x).empty());
  CHECK(evaluate_objective(m, s.x) == s.objective);
  CHECK(feasible_executable_sets(m) ==
        std::vector<std::vector<int>>{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}});
}

TEST_CASE("flipping a placement bit breaks feasibility") {
  auto g = build_mesh(2, 3, false);
  AppRegistry reg(testsupport::small_specs(true));
  IlpModel m = build_model(g, reg, faults(6, {4}), std::nullopt, {});
  Solution s = solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  REQUIRE(check_feasible(m, s.x).empty());
  const VarLayout& L = m.layout;
  for (int v = 0; v < L.xpl_offset(); ++v) {
    std::vector<int> x = s.x;
    x[static_cast<std::size_t>(v)] ^= 1;
    CHECK_FALSE(check_feasible(m, x).empty());
  }
  std::vector<int> x = s.x;
  x[static_cast<std::size_t>(L.r(0))] = 2;
  auto v = check_feasible(m, x);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].kind == Violation::Kind::Bound);
}

TEST_CASE("solver matches exhaustive search on small reallocations") {
  auto g = build_mesh(2, 2, false);
  for (bool alloc : {false, true}) {
    AppRegistry reg(testsupport::small_specs(alloc));
    IlpModel first = build_model(g, reg, FaultState::healthy(4), std::nullopt, {});
    Solution s0 = solve(first);
    REQUIRE(s0.status == SolveStatus::Optimal);
    IntMatrix x_old = extract_allocation(first, s0.x).to_matrix(4);
    for (int c = 0; c < 4; ++c) {
      // The previous allocation may have used the CU that now fails, so
      // drop its nodes from x_old as the simulator would.
      FaultState f = faults(4, {c});
      IntMatrix prev = x_old;
      for (int j = 0; j < prev.cols(); ++j) prev.at(c, j) = 0;
      IlpModel m = build_model(g, reg, f, prev, {});
      Solution a = solve(m);
      Solution b = brute_force(m);
      CAPTURE(alloc);
      CAPTURE(c);
      REQUIRE(a.status == b.status);
      if (a.status != SolveStatus::Optimal) continue;
      CHECK(to_string(a.objective) == to_string(b.objective));
      CHECK(check_feasible(m, a.x).empty());
    }
  }
}

TEST_CASE("cross check over every fault set of a 2x3 mesh") {
  CrossCheck cc = cross_check_solver(build_mesh(2, 3, false), AppRegistry(testsupport::small_specs(true)), 2);
  CHECK(cc.cases == 1 + 6 + 15);
  CHECK(cc.passed());
  CHECK(cc.first_failure.empty());
}

TEST_CASE("solve is deterministic") {
  auto g = build_mesh(4, 4, false);
  AppRegistry reg(testsupport::demo_specs());
  IlpModel m = build_model(g, reg, faults(16, {1, 4, 6, 9}), std::nullopt, {});
  Solution a = solve(m);
  Solution b = solve(m);
  CHECK(a == b);
  CHECK(dump_solution(m, a) == dump_solution(m, b));
}

TEST_CASE("demo initial allocation") {
  auto g = build_mesh(4, 4, false);
  AppRegistry reg(testsupport::demo_specs());
  IlpModel m = build_model(g, reg, FaultState::healthy(16), std::nullopt, {});
  Solution s = solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(extract_running(m, s.x) == std::vector<int>(7, 1));
  // All seven applications run; each allocator reaches the 15 other CUs in
  // 32 hops from an inner CU, so the hop penalty is 3 x 32.
  Wide alpha_sum = 0;
  for (Wide a : m.coef.alpha) alpha_sum += a;
  CHECK(to_string(s.objective) == to_string(alpha_sum - 96));
}

TEST_CASE("forced execution without hardware is infeasible") {
  auto g = build_mesh(2, 2, false);
  AppRegistry reg({AppSpec::grid("A", 1, 1, 1)});
  IlpModel m = build_model(g, reg, faults(4, {0, 1, 2, 3}), std::nullopt, {});
  m.fix(m.layout.r(0), 1);
  CHECK(solve(m).status == SolveStatus::Infeasible);
  CHECK(brute_force(m).status == SolveStatus::Infeasible);
  CHECK(feasible_executable_sets(m).empty());
}

TEST_CASE("node limit yields a timeout status") {
  auto g = build_mesh(4, 4, false);
  AppRegistry reg(testsupport::demo_specs());
  IlpModel m = build_model(g, reg, FaultState::healthy(16), std::nullopt, {});
  SolverConfig cfg;
  cfg.node_limit = 1;
  Solution s = solve(m, cfg);
  CHECK(s.status == SolveStatus::TimedOut);
  cfg.node_limit = 0;
  CHECK_THROWS_AS(solve(m, cfg), InvalidArgument);
}

TEST_CASE("the oracle refuses large models") {
  auto g = build_mesh(4, 4, false);
  AppRegistry reg(testsupport::demo_specs());
  IlpModel m = build_model(g, reg, FaultState::healthy(16), std::nullopt, {});
  CHECK(oracle_variable_count(m) > 64);
  CHECK_THROWS_AS(brute_force(m), OversizeError);
  CHECK_THROWS_AS(feasible_executable_sets(m), OversizeError);
  CHECK_THROWS_AS(cross_check_solver(g, reg, 1), OversizeError);
}
