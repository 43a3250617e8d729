#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace nocr {

using LinkEnds = std::pair<int, int>;

/// One application as requested by a scenario.
///
/// Grid applications (grid_rows x grid_cols > 0) number their nodes
/// row-major, top row first, so local node 0 is the top-left node. Other
/// applications list their nodes and links explicitly.
struct AppSpec {
  std::string name;
  int priority_rank = 1;  // 1 = highest priority
  int grid_rows = 0;
  int grid_cols = 0;
  int explicit_nodes = 0;
  std::vector<LinkEnds> explicit_links;
  std::vector<int> node_types;  // empty = all type 0
  bool is_allocator = false;
  bool is_controller = false;
  std::optional<int> allocator_node;

  bool is_grid() const { return grid_rows > 0 && grid_cols > 0; }
  int node_count() const { return is_grid() ? grid_rows * grid_cols : explicit_nodes; }

  static AppSpec grid(std::string name, int priority, int rows, int cols);
};

struct AppGraph {
  IntMatrix incidence;  // N_nodes^k x N_links^k, binary
  int n_nodes = 0;
  int n_links = 0;
  std::vector<LinkEnds> links;  // local node indices
};

AppGraph build_app_graph(const AppSpec& spec);

/// Ordered application set with the block incidence matrix and every index
/// map between global node/link indices and applications. Applications are
/// stored by ascending priority rank, so index 0 is the highest priority.
class AppRegistry {
 public:
  AppRegistry() = default;
  explicit AppRegistry(std::vector<AppSpec> specs);

  int n_apps() const { return static_cast<int>(apps_.size()); }
  int n_nodes() const { return static_cast<int>(node_app_.size()); }
  int n_links() const { return static_cast<int>(link_app_.size()); }
  int n_realloc() const { return static_cast<int>(allocator_apps_.size()); }

  const AppSpec& app(int k) const { return apps_.at(static_cast<std::size_t>(k)); }
  std::span<const AppSpec> apps() const { return apps_; }

  /// Block-diagonal unoriented incidence matrix of all applications.
  const IntMatrix& block_incidence() const { return h_; }

  int node_app(int node) const { return node_app_.at(static_cast<std::size_t>(node)); }
  int link_app(int link) const { return link_app_.at(static_cast<std::size_t>(link)); }
  int node_offset(int k) const { return node_offset_.at(static_cast<std::size_t>(k)); }
  int link_offset(int k) const { return link_offset_.at(static_cast<std::size_t>(k)); }
  int n_nodes_of(int k) const { return app_graphs_.at(static_cast<std::size_t>(k)).n_nodes; }
  int n_links_of(int k) const { return app_graphs_.at(static_cast<std::size_t>(k)).n_links; }
  /// Global node index of the top-left node of application k.
  int topleft_node(int k) const { return node_offset(k); }
  /// Global node indices belonging to application k.
  std::vector<int> app_nodes(int k) const;
  /// Global endpoints of a global link.
  LinkEnds link_ends(int link) const { return link_ends_.at(static_cast<std::size_t>(link)); }
  int node_type(int node) const { return node_type_.at(static_cast<std::size_t>(node)); }

  /// Application index of allocator replica k (replicas in priority order).
  int allocator_app(int k) const { return allocator_apps_.at(static_cast<std::size_t>(k)); }
  /// Global node hosting allocator replica k.
  int node_of_alloc(int k) const { return node_of_alloc_.at(static_cast<std::size_t>(k)); }
  std::vector<int> controller_apps() const;

  int find_app(const std::string& name) const;

 private:
  std::vector<AppSpec> apps_;
  std::vector<AppGraph> app_graphs_;
  IntMatrix h_;
  std::vector<int> node_app_, link_app_, node_offset_, link_offset_, node_type_;
  std::vector<LinkEnds> link_ends_;
  std::vector<int> allocator_apps_, node_of_alloc_;
};

}  // namespace nocr
