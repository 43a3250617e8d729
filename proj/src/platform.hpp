#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"

namespace nocr {

/// Directed edge of the platform graph (one Physical Link).
struct Edge {
  int tail = 0;
  int head = 0;
};

struct Neighbor {
  int cu = 0;
  int path = 0;
};

/// Platform graph: computational units connected by physical links.
///
/// CU indices are 0-based. On meshes CU i sits at row i / n_row and column
/// i % n_row. Immutable after construction.
class PlatformGraph {
 public:
  PlatformGraph() = default;
  PlatformGraph(int n_cus, std::vector<Edge> edges, int n_row, bool torus,
                std::vector<int> cu_types = {});

  int n_cus() const { return n_cus_; }
  int n_paths() const { return static_cast<int>(edges_.size()); }
  int n_row() const { return n_row_; }
  int rows() const { return n_row_ > 0 ? n_cus_ / n_row_ : 0; }
  bool torus() const { return torus_; }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int path) const { return edges_.at(static_cast<std::size_t>(path)); }
  std::span<const int> cu_types() const { return cu_types_; }

  /// Neighbors of a CU, sorted by neighbor index.
  std::span<const Neighbor> neighbors(int cu) const {
    return adjacency_.at(static_cast<std::size_t>(cu));
  }
  int degree(int cu) const { return static_cast<int>(neighbors(cu).size()); }
  std::optional<int> path_between(int a, int b) const;

  PlatformGraph with_cu_types(std::vector<int> cu_types) const;

 private:
  int n_cus_ = 0;
  std::vector<Edge> edges_;
  int n_row_ = 0;
  bool torus_ = false;
  std::vector<int> cu_types_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Builds a rows x cols mesh. Each CU gets an edge to its right neighbor
/// (+1) and to its top neighbor (+cols). Without wrap-around every edge
/// runs from the lower to the higher index. With torus the last column and
/// row wrap when the dimension is at least 3 (smaller dimensions would
/// duplicate an existing link).
PlatformGraph build_mesh(int rows, int cols, bool torus);

/// N_cus x N_paths incidence matrix: -1 where a path leaves a CU, +1 where it
/// enters.
IntMatrix incidence_matrix(const PlatformGraph& g);

/// Elementwise absolute value of an incidence matrix. Rejects entries
/// outside {-1, 0, 1}.
IntMatrix unoriented_incidence(const IntMatrix& incidence);

struct FaultState {
  std::vector<bool> faulty;      // crash faults, excluded from allocation
  std::vector<bool> comp_fault;  // corrupt outputs; only the simulator reads this

  static FaultState healthy(int n_cus);
  int faulty_count() const;
};

void validate_faults(const PlatformGraph& g, const FaultState& f);

/// Degree and connected components of the subgraph induced by healthy CUs.
struct HealthyView {
  std::vector<int> degree;     // 0 for faulty CUs
  std::vector<int> component;  // -1 for faulty CUs
  std::vector<std::vector<int>> components;  // ordered by smallest member
};

HealthyView effective_degree_and_reachability(const PlatformGraph& g, const FaultState& f);

/// Graphviz rendering: one node per CU labeled with index and health, one
/// undirected edge per path.
std::string to_dot(const PlatformGraph& g, const FaultState& f);

}  // namespace nocr
