#pragma once

// Fixtures and independent reference computations shared by the tests.

#include <algorithm>
#include <string>
#include <vector>

#include "appmodel.hpp"
#include "ilp.hpp"
#include "platform.hpp"

namespace testsupport {

inline std::vector<nocr::AppSpec> demo_specs() {
  std::vector<nocr::AppSpec> s;
  for (int i = 1; i <= 3; ++i) {
    auto a = nocr::AppSpec::grid("ctrl" + std::to_string(i), i, 1, 2);
    a.is_controller = true;
    s.push_back(a);
  }
  for (int i = 1; i <= 3; ++i) {
    auto a = nocr::AppSpec::grid("alloc" + std::to_string(i), 3 + i, 1, 1);
    a.is_allocator = true;
    a.allocator_node = 0;
    s.push_back(a);
  }
  s.push_back(nocr::AppSpec::grid("dummy", 7, 1, 2));
  return s;
}

// Ranks 1 and 2 are 1x2 grids, rank 3 a single node.
inline std::vector<nocr::AppSpec> small_specs(bool third_is_allocator = false) {
  std::vector<nocr::AppSpec> s = {nocr::AppSpec::grid("A", 1, 1, 2), nocr::AppSpec::grid("B", 2, 1, 2),
                                  nocr::AppSpec::grid("C", 3, 1, 1)};
  if (third_is_allocator) {
    s[2].is_allocator = true;
    s[2].allocator_node = 0;
  }
  return s;
}

inline nocr::FaultState faults(int n, std::initializer_list<int> cus) {
  nocr::FaultState f = nocr::FaultState::healthy(n);
  for (int c : cus) f.faulty[static_cast<std::size_t>(c)] = true;
  return f;
}

// All-pairs hop distances between healthy CUs by Floyd-Warshall over the
// edge list; -1 when unreachable. Deliberately shares no code with BFS.
inline std::vector<std::vector<int>> healthy_distances(const nocr::PlatformGraph& g, const nocr::FaultState& f) {
  const int n = g.n_cus();
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), inf));
  for (int i = 0; i < n; ++i)
    if (!f.faulty[static_cast<std::size_t>(i)]) d[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0;
  for (const auto& e : g.edges())
    if (!f.faulty[static_cast<std::size_t>(e.tail)] && !f.faulty[static_cast<std::size_t>(e.head)]) {
      d[static_cast<std::size_t>(e.tail)][static_cast<std::size_t>(e.head)] = 1;
      d[static_cast<std::size_t>(e.head)][static_cast<std::size_t>(e.tail)] = 1;
    }
  for (std::size_t k = 0; k < d.size(); ++k)
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (auto& row : d)
    for (int& v : row)
      if (v >= inf) v = -1;
  return d;
}

// alpha_k has the closed form base * 2^(N-1-k) with
// base = (beta+1) * n_nodes + beta + 1.
inline std::vector<nocr::Wide> closed_form_alpha(int n_apps, int n_nodes, nocr::Wide beta) {
  nocr::Wide base = (beta + 1) * n_nodes + beta + 1;
  std::vector<nocr::Wide> a;
  for (int k = 0; k < n_apps; ++k) a.push_back(base << (n_apps - 1 - k));
  return a;
}

}  // namespace testsupport
