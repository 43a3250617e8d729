#include <doctest.h>

#include "appmodel.hpp"
#include "support.hpp"

using namespace nocr;

TEST_CASE("grid applications number nodes row-major") {
  auto g = build_app_graph(AppSpec::grid("x", 1, 2, 3));
  CHECK(g.n_nodes == 6);
  // 2 rows x 2 horizontal links + 3 vertical links.
  CHECK(g.n_links == 7);
  CHECK(g.links[0] == LinkEnds{0, 1});
  CHECK(g.links[1] == LinkEnds{0, 3});
  for (int j = 0; j < g.n_links; ++j) {
    int s = 0;
    for (int i = 0; i < g.n_nodes; ++i) s += g.incidence.at(i, j);
    CHECK(s == 2);
  }
  CHECK(build_app_graph(AppSpec::grid("one", 1, 1, 1)).n_links == 0);
}

TEST_CASE("explicit application graphs are validated") {
  AppSpec s;
  s.name = "e";
  s.explicit_nodes = 3;
  s.explicit_links = {{0, 1}, {1, 2}};
  CHECK(build_app_graph(s).n_links == 2);
  s.explicit_links = {{0, 3}};
  CHECK_THROWS_AS(build_app_graph(s), InvalidArgument);
  s.explicit_links = {{1, 1}};
  CHECK_THROWS_AS(build_app_graph(s), InvalidArgument);
  s.explicit_links = {{0, 1}, {1, 0}};
  CHECK_THROWS_AS(build_app_graph(s), InvalidArgument);
  s.explicit_links.clear();
  s.explicit_nodes = 0;
  CHECK_THROWS_AS(build_app_graph(s), InvalidArgument);
}

TEST_CASE("registry orders by priority and maps indices") {
  auto specs = testsupport::demo_specs();
  std::reverse(specs.begin(), specs.end());
  AppRegistry reg(specs);
  CHECK(reg.n_apps() == 7);
  CHECK(reg.n_nodes() == 11);
  CHECK(reg.n_links() == 4);
  CHECK(reg.app(0).name == "ctrl1");
  CHECK(reg.app(6).name == "dummy");
  CHECK(reg.n_realloc() == 3);
  CHECK(reg.allocator_app(0) == 3);
  CHECK(reg.node_of_alloc(0) == 6);
  CHECK(reg.node_of_alloc(2) == 8);
  CHECK(reg.topleft_node(6) == 9);
  CHECK(reg.app_nodes(1) == std::vector<int>{2, 3});
  CHECK(reg.link_ends(3) == LinkEnds{9, 10});
  CHECK(reg.controller_apps() == std::vector<int>{0, 1, 2});
  CHECK(reg.find_app("alloc2") == 4);
  CHECK(reg.find_app("nope") == -1);
  // Block incidence: link l joins exactly its two endpoints.
  const IntMatrix& H = reg.block_incidence();
  for (int l = 0; l < reg.n_links(); ++l) {
    auto [u, v] = reg.link_ends(l);
    CHECK(H.at(u, l) == 1);
    CHECK(H.at(v, l) == 1);
    CHECK(reg.node_app(u) == reg.link_app(l));
  }
}

TEST_CASE("registry rejects bad ranks and allocator nodes") {
  auto a = AppSpec::grid("a", 1, 1, 1);
  auto b = AppSpec::grid("b", 1, 1, 1);
  CHECK_THROWS_AS(AppRegistry({a, b}), InvalidArgument);
  b.priority_rank = 3;
  CHECK_THROWS_AS(AppRegistry({a, b}), InvalidArgument);
  b.priority_rank = 2;
  b.is_allocator = true;
  CHECK_THROWS_AS(AppRegistry({a, b}), InvalidArgument);
  b.allocator_node = 1;
  CHECK_THROWS_AS(AppRegistry({a, b}), InvalidArgument);
  b.allocator_node = 0;
  CHECK(AppRegistry({a, b}).n_realloc() == 1);
  a.node_types = {0, 1};
  CHECK_THROWS_AS(AppRegistry({a, b}), InvalidArgument);
}
