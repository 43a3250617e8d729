#include <doctest.h>

#include "ilp.hpp"
#include "solver.hpp"
#include "support.hpp"

using namespace nocr;
using testsupport::faults;

namespace {

IlpModel demo_model(const FaultState& f, const std::optional<IntMatrix>& x_old = std::nullopt,
                    BuildOptions opts = {}) {
  return build_model(build_mesh(4, 4, false), AppRegistry(testsupport::demo_specs()), f, x_old, opts);
}

}  // namespace

TEST_CASE("layout blocks are contiguous and named") {
  VarLayout L(16, 24, 11, 4, 7, 3);
  CHECK(L.xcn(0, 0) == 0);
  CHECK(L.xcn(15, 0) == 15);
  CHECK(L.xcn(0, 1) == 16);
  CHECK(L.xpl_offset() == 176);
  CHECK(L.r_offset() == 176 + 96);
  CHECK(L.m_offset() == L.r_offset() + 7);
  CHECK(L.comm_offset() == L.m_offset() + 11);
  CHECK(L.hat_offset() == L.comm_offset() + 3 * 24 * 16);
  CHECK(L.total() == L.hat_offset() + 3 * 24 * 16);
  CHECK(L.primary_count() == L.hat_offset());
  CHECK(L.aux_count() == 3 * 24 * 16);
  CHECK(L.name(L.xcn(3, 1)) == "Xcn[3,1]");
  CHECK(L.name(L.xpl(5, 2)) == "Xpl[5,2]");
  CHECK(L.name(L.r(6)) == "r[6]");
  CHECK(L.name(L.m(10)) == "M[10]");
  CHECK(L.name(L.xcomm(2, 7, 9)) == "Xcomm[2,7,9]");
  CHECK(L.name(L.xhat(1, 0, 15)) == "Xhat[1,0,15]");
  CHECK_THROWS_AS(L.name(L.total()), InvalidArgument);
}

TEST_CASE("coefficients match the closed form") {
  for (int apps = 1; apps <= 8; ++apps)
    for (int nodes : {1, 7, 32})
      for (Wide beta : {Wide(0), Wide(1), Wide(1152)}) {
        Coefficients c = compute_coefficients(apps, nodes, beta);
        CHECK(c.alpha == testsupport::closed_form_alpha(apps, nodes, beta));
      }
}

TEST_CASE("demo coefficients") {
  auto g = build_mesh(4, 4, false);
  AppRegistry reg(testsupport::demo_specs());
  Coefficients c = compute_coefficients(reg, g);
  CHECK(c.beta == 1152);  // 3 allocators x 16 CUs x 24 paths
  CHECK(c.alpha.back() == 1153 * 12);
  CHECK(c.alpha.front() == Wide(1153 * 12) * 64);
}

TEST_CASE("coefficient overflow is reported, not wrapped") {
  CHECK_THROWS_AS(compute_coefficients(200, 32, 1152), OverflowError);
  CHECK_THROWS_AS(compute_coefficients(-1, 1, 0), InvalidArgument);
}

TEST_CASE("row family sizes") {
  IlpModel m = demo_model(FaultState::healthy(16));
  CHECK(m.count_rows(RowFamily::Partitioning) == 16 + 11 + 24 + 4);
  CHECK(m.count_rows(RowFamily::Compliance) == 16 * 4);
  CHECK(m.count_rows(RowFamily::Reallocation) == 0);
  CHECK(m.count_rows(RowFamily::Fault) == 0);
  CHECK(m.count_rows(RowFamily::Communication) == 3 * 16 * 16);
  CHECK(m.count_rows(RowFamily::Orientation) == 0);
  CHECK(m.count_rows(RowFamily::Linearization) == 2 * 3 * 24 * 16);

  // Faulty CUs 1,4,6,9 also isolate CUs 0 and 5.
  IlpModel f = demo_model(faults(16, {1, 4, 6, 9}));
  CHECK(f.count_rows(RowFamily::Fault) == 6);
}

TEST_CASE("objective weights") {
  IlpModel m = demo_model(FaultState::healthy(16));
  const VarLayout& L = m.layout;
  CHECK(m.c[static_cast<std::size_t>(L.r(0))] == m.coef.alpha[0]);
  CHECK(m.c[static_cast<std::size_t>(L.m(3))] == -(m.coef.beta + 1));
  CHECK(m.c[static_cast<std::size_t>(L.xhat(0, 0, 0))] == -1);
  CHECK(m.c[static_cast<std::size_t>(L.xcomm(0, 0, 0))] == 0);
  CHECK(m.c[static_cast<std::size_t>(L.xcn(0, 0))] == 0);
}

TEST_CASE("drop-everything point is feasible with objective 0") {
  IlpModel m = demo_model(FaultState::healthy(16));
  std::vector<int> x(static_cast<std::size_t>(m.layout.total()), 0);
  CHECK(check_feasible(m, x).empty());
  CHECK(evaluate_objective(m, x) == 0);
  CHECK_THROWS_AS(evaluate_objective(m, std::vector<int>(3, 0)), InvalidArgument);
  auto v = check_feasible(m, std::vector<int>(3, 0));
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::Length);
}

TEST_CASE("reallocation rows follow the previous allocation") {
  auto g = build_mesh(4, 4, false);
  AppRegistry reg(testsupport::demo_specs());
  Allocation old;
  old.host = {0, 1, 2, 3, 4, 5, 6, 9, 10, -1, -1};
  IlpModel m = build_model(g, reg, FaultState::healthy(16), old.to_matrix(16), {});
  CHECK(m.count_rows(RowFamily::Reallocation) == 9);

  IntMatrix wrong(15, 11);
  CHECK_THROWS_AS(build_model(g, reg, FaultState::healthy(16), wrong, {}), InvalidArgument);
  IntMatrix twice = old.to_matrix(16);
  twice.at(7, 0) = 1;
  CHECK_THROWS_AS(build_model(g, reg, FaultState::healthy(16), twice, {}), InvalidArgument);
  IntMatrix nonbinary = old.to_matrix(16);
  nonbinary.at(0, 0) = 2;
  CHECK_THROWS_AS(build_model(g, reg, FaultState::healthy(16), nonbinary, {}), InvalidArgument);
}

TEST_CASE("allocation matrix round trip") {
  Allocation a;
  a.host = {2, -1, 0};
  IntMatrix x = a.to_matrix(3);
  CHECK(x.at(2, 0) == 1);
  CHECK(x.nonzeros() == 2);
  CHECK(Allocation::from_matrix(x) == a);
  x.at(1, 0) = 1;
  CHECK_THROWS_AS(Allocation::from_matrix(x), InvalidArgument);
}

TEST_CASE("orientation keeps grid applications upright") {
  auto g = build_mesh(3, 3, false);
  AppRegistry reg({AppSpec::grid("wide", 1, 1, 2), AppSpec::grid("tall", 2, 2, 1)});
  BuildOptions opts;
  opts.orientation = true;
  IlpModel m = build_model(g, reg, FaultState::healthy(9), std::nullopt, opts);
  const VarLayout& L = m.layout;
  // The left node cannot sit in the rightmost column, the lower node of
  // "tall" cannot sit in the top row.
  for (int r = 0; r < 3; ++r) CHECK(m.ub[static_cast<std::size_t>(L.xcn(r * 3 + 2, 0))] == 0);
  for (int c = 0; c < 3; ++c) CHECK(m.ub[static_cast<std::size_t>(L.xcn(6 + c, 2))] == 0);
  CHECK(m.count_rows(RowFamily::Orientation) == 6 + 6);
  Solution s = solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  Allocation a = extract_allocation(m, s.x);
  CHECK(a.host[1] == a.host[0] + 1);
  CHECK(a.host[3] == a.host[2] + 3);
}

TEST_CASE("torus orientation wraps around") {
  auto g = build_mesh(3, 3, true);
  AppRegistry reg({AppSpec::grid("wide", 1, 1, 2)});
  BuildOptions opts;
  opts.orientation = true;
  IlpModel m = build_model(g, reg, FaultState::healthy(9), std::nullopt, opts);
  // No boundary on a torus: one row per CU for the single right step.
  CHECK(m.count_rows(RowFamily::Orientation) == 9);
  for (int i = 0; i < 9; ++i) CHECK(m.ub[static_cast<std::size_t>(m.layout.xcn(i, 0))] == 1);
}

TEST_CASE("types restrict node placement") {
  auto g = build_mesh(1, 3, false).with_cu_types({0, 1, 1});
  AppSpec a = AppSpec::grid("typed", 1, 1, 2);
  a.node_types = {1, 1};
  AppRegistry reg({a});
  BuildOptions opts;
  opts.types = true;
  IlpModel m = build_model(g, reg, FaultState::healthy(3), std::nullopt, opts);
  CHECK(m.ub[static_cast<std::size_t>(m.layout.xcn(0, 0))] == 0);
  CHECK(m.ub[static_cast<std::size_t>(m.layout.xcn(1, 0))] == 1);
  Solution s = solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  auto hosts = extract_allocation(m, s.x).host;
  std::sort(hosts.begin(), hosts.end());
  CHECK(hosts == std::vector<int>{1, 2});
}

TEST_CASE("dump format") {
  auto g = build_mesh(1, 2, false);
  AppRegistry reg({AppSpec::grid("a", 1, 1, 1)});
  IlpModel m = build_model(g, reg, FaultState::healthy(2), std::nullopt, {});
  std::string d = dump_model(m);
  CHECK(d.rfind("maximize\n", 0) == 0);
  CHECK(d.find("subject to\n") != std::string::npos);
  CHECK(d.find("  R0: +1 Xcn[0,0] <= 1\n") != std::string::npos);
  CHECK(d.find("bounds\n") != std::string::npos);
  CHECK(d.find("  0 <= r[0] <= 1\n") != std::string::npos);
  CHECK(d.substr(d.size() - 4) == "end\n");
  CHECK(dump_model(m) == d);
}
