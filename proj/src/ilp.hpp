#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "appmodel.hpp"
#include "common.hpp"
#include "platform.hpp"

namespace nocr {

/// Host CU of every global application node, -1 when the node is not placed.
struct Allocation {
  std::vector<int> host;

  IntMatrix to_matrix(int n_cus) const;
  static Allocation from_matrix(const IntMatrix& x);
  bool operator==(const Allocation&) const = default;
};

/// Index map of the decision vector. Blocks appear in this order:
/// X^{CUs->nodes}, X^{paths->links}, r, M, X^{Comm,k} for every allocator,
/// then the |X^{Comm,k}| auxiliaries. Matrices are flattened column-major.
class VarLayout {
 public:
  VarLayout() = default;
  VarLayout(int n_cus, int n_paths, int n_nodes, int n_links, int n_apps, int n_realloc);

  int xcn(int cu, int node) const { return node * n_cus_ + cu; }
  int xpl(int path, int link) const { return xpl_off_ + link * n_paths_ + path; }
  int r(int app) const { return r_off_ + app; }
  int m(int node) const { return m_off_ + node; }
  int xcomm(int k, int path, int cu) const {
    return comm_off_ + (k * n_cus_ + cu) * n_paths_ + path;
  }
  int xhat(int k, int path, int cu) const {
    return hat_off_ + (k * n_cus_ + cu) * n_paths_ + path;
  }

  int xpl_offset() const { return xpl_off_; }
  int r_offset() const { return r_off_; }
  int m_offset() const { return m_off_; }
  /// First communication variable; every variable below it is an
  /// assignment, link, execution or move variable.
  int comm_offset() const { return comm_off_; }
  int hat_offset() const { return hat_off_; }
  int primary_count() const { return hat_off_; }
  int aux_count() const { return total_ - hat_off_; }
  int total() const { return total_; }

  int n_cus() const { return n_cus_; }
  int n_paths() const { return n_paths_; }
  int n_nodes() const { return n_nodes_; }
  int n_links() const { return n_links_; }
  int n_apps() const { return n_apps_; }
  int n_realloc() const { return n_realloc_; }

  /// Deterministic variable name, e.g. Xcn[3,1] or Xcomm[0,5,2].
  std::string name(int var) const;

 private:
  int n_cus_ = 0, n_paths_ = 0, n_nodes_ = 0, n_links_ = 0, n_apps_ = 0, n_realloc_ = 0;
  int xpl_off_ = 0, r_off_ = 0, m_off_ = 0, comm_off_ = 0, hat_off_ = 0, total_ = 0;
};

/// Objective weights. alpha[k] belongs to the application of priority rank
/// k + 1; moves cost beta + 1 each and every used link hop costs 1.
struct Coefficients {
  Wide beta = 0;
  std::vector<Wide> alpha;
};

Coefficients compute_coefficients(int n_apps, int n_nodes, Wide beta);
Coefficients compute_coefficients(const AppRegistry& reg, const PlatformGraph& g);

enum class Sense { Le, Eq };

enum class RowFamily {
  Partitioning,
  Compliance,
  Reallocation,
  Fault,
  Communication,
  Orientation,
  Linearization
};

struct Term {
  int var = 0;
  int coef = 0;
};

struct Row {
  std::vector<Term> terms;
  Sense sense = Sense::Eq;
  long long rhs = 0;
  RowFamily family = RowFamily::Partitioning;
};

struct BuildOptions {
  bool orientation = false;
  bool types = false;
};

/// Which CUs take part in the allocators' broadcast flows.
///
/// A CU is a sink when it is healthy, has a healthy neighbor, and its
/// healthy component contains a CU able to host an allocator. A CU is
/// isolated when faults removed all its neighbors; it cannot host nodes.
struct CommReach {
  HealthyView view;
  std::vector<bool> included;
  std::vector<bool> isolated;
};

CommReach compute_comm_reach(const PlatformGraph& g, const FaultState& f, const AppRegistry& reg,
                             const BuildOptions& opts);

/// Everything a model was built from. Shared by the model and the solvers.
struct ModelContext {
  PlatformGraph graph;
  AppRegistry registry;
  FaultState faults;
  std::optional<IntMatrix> x_old;
  BuildOptions options;
  CommReach reach;
  IntMatrix incidence;   // G
  IntMatrix unoriented;  // |G|
};

std::shared_ptr<const ModelContext> make_context(PlatformGraph g, AppRegistry reg, FaultState f,
                                                 std::optional<IntMatrix> x_old,
                                                 BuildOptions opts);

/// maximize c^T x subject to the rows, lb <= x <= ub, x integer.
/// Rows carry their own sense: Le rows form M1 x <= b1, Eq rows M2 x = b2.
struct IlpModel {
  VarLayout layout;
  Coefficients coef;
  std::vector<Wide> c;
  std::vector<Row> rows;
  std::vector<int> lb;
  std::vector<int> ub;
  std::shared_ptr<const ModelContext> context;

  void add_row(std::vector<Term> terms, Sense sense, long long rhs, RowFamily family);
  void fix(int var, int value);
  std::size_t count_rows(RowFamily family) const;
};

/// Layout, domains and coefficients, no rows.
IlpModel make_empty_model(std::shared_ptr<const ModelContext> ctx);

void build_objective(IlpModel& m);
void add_partitioning_constraints(IlpModel& m);
void add_compliance_constraints(IlpModel& m);
void add_reallocation_constraints(IlpModel& m);
void add_fault_constraints(IlpModel& m);
void add_comm_constraints(IlpModel& m);
void add_orientation_constraints(IlpModel& m);
void add_type_constraints(IlpModel& m);
void add_abs_linearization(IlpModel& m);

IlpModel build_model(const PlatformGraph& g, const AppRegistry& reg, const FaultState& f,
                     const std::optional<IntMatrix>& x_old, const BuildOptions& opts);
IlpModel build_model(std::shared_ptr<const ModelContext> ctx);

/// Plain-text LP-style dump: objective, one row per line, bounds.
std::string dump_model(const IlpModel& m);

Wide evaluate_objective(const IlpModel& m, const std::vector<int>& x);

}  // namespace nocr
