#include <doctest.h>

#include "platform.hpp"
#include "support.hpp"

using namespace nocr;

TEST_CASE("mesh edge counts") {
  CHECK(build_mesh(4, 4, false).n_paths() == 24);
  CHECK(build_mesh(2, 3, false).n_paths() == 7);
  CHECK(build_mesh(1, 1, false).n_paths() == 0);
  CHECK(build_mesh(1, 3, false).n_paths() == 2);
  // Every CU gains one right and one top edge on a torus.
  CHECK(build_mesh(3, 3, true).n_paths() == 18);
  // Wrapping a dimension of 2 would duplicate an edge, so it is skipped.
  CHECK(build_mesh(2, 2, true).n_paths() == 4);
}

TEST_CASE("mesh edges are ordered right then top, per CU") {
  auto g = build_mesh(2, 2, false);
  REQUIRE(g.n_paths() == 4);
  CHECK(g.edge(0).tail == 0);
  CHECK(g.edge(0).head == 1);
  CHECK(g.edge(1).tail == 0);
  CHECK(g.edge(1).head == 2);
  CHECK(g.edge(2).tail == 1);
  CHECK(g.edge(2).head == 3);
  CHECK(g.edge(3).tail == 2);
  CHECK(g.edge(3).head == 3);
}

TEST_CASE("incidence matrix columns have one tail and one head") {
  for (auto g : {build_mesh(3, 4, false), build_mesh(3, 3, true)}) {
    IntMatrix G = incidence_matrix(g);
    CHECK(G.rows() == g.n_cus());
    CHECK(G.cols() == g.n_paths());
    for (int p = 0; p < g.n_paths(); ++p) {
      int plus = 0, minus = 0;
      for (int i = 0; i < g.n_cus(); ++i) {
        if (G.at(i, p) == 1) ++plus;
        if (G.at(i, p) == -1) ++minus;
      }
      CHECK(plus == 1);
      CHECK(minus == 1);
      CHECK(G.at(g.edge(p).tail, p) == -1);
      CHECK(G.at(g.edge(p).head, p) == 1);
    }
    IntMatrix U = unoriented_incidence(G);
    for (int i = 0; i < G.rows(); ++i) {
      int deg = 0;
      for (int p = 0; p < G.cols(); ++p) deg += U.at(i, p);
      CHECK(deg == g.degree(i));
    }
  }
}

TEST_CASE("unoriented incidence rejects non-incidence entries") {
  IntMatrix m(1, 1);
  m.at(0, 0) = 2;
  CHECK_THROWS_AS(unoriented_incidence(m), InvalidArgument);
}

TEST_CASE("graph construction validates edges") {
  CHECK_THROWS_AS(PlatformGraph(2, {{0, 2}}, 2, false), InvalidArgument);
  CHECK_THROWS_AS(PlatformGraph(2, {{1, 1}}, 2, false), InvalidArgument);
  CHECK_THROWS_AS(PlatformGraph(2, {{0, 1}, {1, 0}}, 2, false), InvalidArgument);
  CHECK_THROWS_AS(PlatformGraph(2, {{0, 1}}, 2, false, {0}), InvalidArgument);
  CHECK_THROWS_AS(build_mesh(0, 3, false), InvalidArgument);
  auto g = build_mesh(3, 3, false);
  CHECK(g.path_between(4, 5).has_value());
  CHECK_FALSE(g.path_between(0, 4).has_value());
  // Neighbor lists are sorted by CU index.
  auto nb = g.neighbors(4);
  REQUIRE(nb.size() == 4);
  for (std::size_t i = 1; i < nb.size(); ++i) CHECK(nb[i - 1].cu < nb[i].cu);
}

TEST_CASE("healthy view: degrees and components") {
  auto g = build_mesh(4, 4, false);
  auto view = effective_degree_and_reachability(g, testsupport::faults(16, {1, 4, 6, 9}));
  // CU 5 lost all four neighbors, CU 0 both of its own.
  CHECK(view.degree[5] == 0);
  CHECK(view.degree[0] == 0);
  CHECK(view.component[1] == -1);
  CHECK(view.component[5] != view.component[10]);
  CHECK(view.component[10] == view.component[15]);
  CHECK(view.degree[10] == 2);  // 11 and 14 remain
  std::size_t members = 0;
  for (const auto& c : view.components) members += c.size();
  CHECK(members == 12);
}

TEST_CASE("validate_faults checks lengths") {
  auto g = build_mesh(2, 2, false);
  FaultState f = FaultState::healthy(3);
  CHECK_THROWS_AS(validate_faults(g, f), InvalidArgument);
  CHECK(FaultState::healthy(4).faulty_count() == 0);
  CHECK(testsupport::faults(4, {0, 3}).faulty_count() == 2);
}

TEST_CASE("dot export marks faulty CUs") {
  auto g = build_mesh(1, 2, false);
  std::string dot = to_dot(g, testsupport::faults(2, {1}));
  CHECK(dot.find("graph platform") != std::string::npos);
  CHECK(dot.find("1 faulty") != std::string::npos);
  CHECK(dot.find("0 healthy") != std::string::npos);
}
