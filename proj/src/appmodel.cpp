#include "appmodel.hpp"

#include <algorithm>
#include <set>

namespace nocr {

AppSpec AppSpec::grid(std::string name, int priority, int rows, int cols) {
  AppSpec s;
  s.name = std::move(name);
  s.priority_rank = priority;
  s.grid_rows = rows;
  s.grid_cols = cols;
  return s;
}

AppGraph build_app_graph(const AppSpec& spec) {
  AppGraph g;
  if (spec.is_grid()) {
    g.n_nodes = spec.grid_rows * spec.grid_cols;
    for (int a = 0; a < spec.grid_rows; ++a)
      for (int b = 0; b < spec.grid_cols; ++b) {
        int u = a * spec.grid_cols + b;
        if (b + 1 < spec.grid_cols) g.links.emplace_back(u, u + 1);
        if (a + 1 < spec.grid_rows) g.links.emplace_back(u, u + spec.grid_cols);
      }
  } else {
    if (spec.grid_rows != 0 || spec.grid_cols != 0)
      throw InvalidArgument("application '" + spec.name + "': grid dimensions must be positive");
    if (spec.explicit_nodes < 1)
      throw InvalidArgument("application '" + spec.name + "' needs at least one node");
    g.n_nodes = spec.explicit_nodes;
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : spec.explicit_links) {
      if (u < 0 || u >= g.n_nodes || v < 0 || v >= g.n_nodes)
        throw InvalidArgument("application '" + spec.name + "': link references a nonexistent node");
      if (u == v) throw InvalidArgument("application '" + spec.name + "': self-loop link");
      if (!seen.insert(std::minmax(u, v)).second)
        throw InvalidArgument("application '" + spec.name + "': duplicate link");
      g.links.emplace_back(u, v);
    }
  }
  g.n_links = static_cast<int>(g.links.size());
  g.incidence = IntMatrix(g.n_nodes, g.n_links);
  for (int j = 0; j < g.n_links; ++j) {
    g.incidence.at(g.links[static_cast<std::size_t>(j)].first, j) = 1;
    g.incidence.at(g.links[static_cast<std::size_t>(j)].second, j) = 1;
  }
  return g;
}

AppRegistry::AppRegistry(std::vector<AppSpec> specs) : apps_(std::move(specs)) {
  std::stable_sort(apps_.begin(), apps_.end(), [](const AppSpec& a, const AppSpec& b) {
    return a.priority_rank < b.priority_rank;
  });
  for (int k = 0; k < n_apps(); ++k) {
    const AppSpec& s = apps_[static_cast<std::size_t>(k)];
    if (s.priority_rank != k + 1) {
      if (k > 0 && apps_[static_cast<std::size_t>(k) - 1].priority_rank == s.priority_rank)
        throw InvalidArgument("duplicate priority rank " + std::to_string(s.priority_rank));
      throw InvalidArgument("priority ranks must form a permutation of 1..N_apps");
    }
  }

  int nodes = 0;
  int links = 0;
  for (int k = 0; k < n_apps(); ++k) {
    const AppSpec& s = apps_[static_cast<std::size_t>(k)];
    AppGraph g = build_app_graph(s);
    if (!s.node_types.empty() && static_cast<int>(s.node_types.size()) != g.n_nodes)
      throw InvalidArgument("application '" + s.name + "': node_types length mismatch");
    if (s.is_allocator) {
      if (!s.allocator_node)
        throw InvalidArgument("application '" + s.name + "' is an allocator without allocator_node");
      if (*s.allocator_node < 0 || *s.allocator_node >= g.n_nodes)
        throw InvalidArgument("application '" + s.name + "': allocator_node out of range");
      allocator_apps_.push_back(k);
      node_of_alloc_.push_back(nodes + *s.allocator_node);
    }
    node_offset_.push_back(nodes);
    link_offset_.push_back(links);
    for (int u = 0; u < g.n_nodes; ++u) {
      node_app_.push_back(k);
      node_type_.push_back(s.node_types.empty() ? 0 : s.node_types[static_cast<std::size_t>(u)]);
    }
    for (auto [u, v] : g.links) {
      link_app_.push_back(k);
      link_ends_.emplace_back(nodes + u, nodes + v);
    }
    nodes += g.n_nodes;
    links += g.n_links;
    app_graphs_.push_back(std::move(g));
  }

  h_ = IntMatrix(nodes, links);
  for (int j = 0; j < links; ++j) {
    h_.at(link_ends_[static_cast<std::size_t>(j)].first, j) = 1;
    h_.at(link_ends_[static_cast<std::size_t>(j)].second, j) = 1;
  }
}

std::vector<int> AppRegistry::app_nodes(int k) const {
  std::vector<int> out;
  for (int u = 0; u < n_nodes_of(k); ++u) out.push_back(node_offset(k) + u);
  return out;
}

std::vector<int> AppRegistry::controller_apps() const {
  std::vector<int> out;
  for (int k = 0; k < n_apps(); ++k)
    if (app(k).is_controller) out.push_back(k);
  return out;
}

int AppRegistry::find_app(const std::string& name) const {
  for (int k = 0; k < n_apps(); ++k)
    if (app(k).name == name) return k;
  return -1;
}

}  // namespace nocr
