#include "ilp.hpp"

#include <sstream>

namespace nocr {

IntMatrix Allocation::to_matrix(int n_cus) const {
  IntMatrix x(n_cus, static_cast<int>(host.size()));
  for (int j = 0; j < static_cast<int>(host.size()); ++j) {
    int h = host[static_cast<std::size_t>(j)];
    if (h >= 0) x.at(h, j) = 1;
  }
  return x;
}

Allocation Allocation::from_matrix(const IntMatrix& x) {
  Allocation a;
  a.host.assign(static_cast<std::size_t>(x.cols()), -1);
  for (int j = 0; j < x.cols(); ++j)
    for (int i = 0; i < x.rows(); ++i) {
      if (x.at(i, j) == 0) continue;
      if (x.at(i, j) != 1) throw InvalidArgument("allocation matrix must be binary");
      if (a.host[static_cast<std::size_t>(j)] >= 0)
        throw InvalidArgument("node " + std::to_string(j) + " assigned to more than one CU");
      a.host[static_cast<std::size_t>(j)] = i;
    }
  return a;
}

VarLayout::VarLayout(int n_cus, int n_paths, int n_nodes, int n_links, int n_apps, int n_realloc)
    : n_cus_(n_cus), n_paths_(n_paths), n_nodes_(n_nodes), n_links_(n_links), n_apps_(n_apps),
      n_realloc_(n_realloc) {
  xpl_off_ = n_cus * n_nodes;
  r_off_ = xpl_off_ + n_paths * n_links;
  m_off_ = r_off_ + n_apps;
  comm_off_ = m_off_ + n_nodes;
  hat_off_ = comm_off_ + n_realloc * n_paths * n_cus;
  total_ = hat_off_ + n_realloc * n_paths * n_cus;
}

std::string VarLayout::name(int var) const {
  std::ostringstream s;
  if (var < 0 || var >= total_) throw InvalidArgument("variable index out of range");
  if (var < xpl_off_) {
    s << "Xcn[" << var % n_cus_ << ',' << var / n_cus_ << ']';
  } else if (var < r_off_) {
    int v = var - xpl_off_;
    s << "Xpl[" << v % n_paths_ << ',' << v / n_paths_ << ']';
  } else if (var < m_off_) {
    s << "r[" << var - r_off_ << ']';
  } else if (var < comm_off_) {
    s << "M[" << var - m_off_ << ']';
  } else {
    bool hat = var >= hat_off_;
    int v = var - (hat ? hat_off_ : comm_off_);
    int block = n_paths_ * n_cus_;
    int k = v / block;
    int rest = v % block;
    s << (hat ? "Xhat[" : "Xcomm[") << k << ',' << rest % n_paths_ << ',' << rest / n_paths_
      << ']';
  }
  return s.str();
}

Coefficients compute_coefficients(int n_apps, int n_nodes, Wide beta) {
  if (n_apps < 0 || n_nodes < 0 || beta < 0)
    throw InvalidArgument("coefficient inputs must be nonnegative");
  Coefficients c;
  c.beta = beta;
  c.alpha.assign(static_cast<std::size_t>(n_apps), 0);
  // (beta + 1) * N_nodes + beta + 1
  Wide base = checked_add(checked_mul(checked_add(beta, 1), n_nodes), checked_add(beta, 1));
  Wide tail_sum = 0;
  for (int k = n_apps - 1; k >= 0; --k) {
    Wide a = checked_add(tail_sum, base);
    c.alpha[static_cast<std::size_t>(k)] = a;
    tail_sum = checked_add(tail_sum, a);
  }
  return c;
}

Coefficients compute_coefficients(const AppRegistry& reg, const PlatformGraph& g) {
  Wide beta = checked_mul(checked_mul(reg.n_realloc(), g.n_cus()), g.n_paths());
  return compute_coefficients(reg.n_apps(), reg.n_nodes(), beta);
}

CommReach compute_comm_reach(const PlatformGraph& g, const FaultState& f, const AppRegistry& reg,
                             const BuildOptions& opts) {
  CommReach reach;
  reach.view = effective_degree_and_reachability(g, f);
  const auto n = static_cast<std::size_t>(g.n_cus());
  std::vector<bool> capable(n, false);
  for (int i = 0; i < g.n_cus(); ++i) {
    if (f.faulty[static_cast<std::size_t>(i)] || reg.n_realloc() == 0) continue;
    bool ok = !opts.types;
    for (int k = 0; k < reg.n_realloc() && !ok; ++k)
      ok = reg.node_type(reg.node_of_alloc(k)) == g.cu_types()[static_cast<std::size_t>(i)];
    capable[static_cast<std::size_t>(i)] = ok;
  }
  std::vector<bool> component_capable(reach.view.components.size(), false);
  for (std::size_t c = 0; c < reach.view.components.size(); ++c)
    for (int cu : reach.view.components[c])
      if (capable[static_cast<std::size_t>(cu)]) component_capable[c] = true;

  reach.included.assign(n, false);
  reach.isolated.assign(n, false);
  for (int i = 0; i < g.n_cus(); ++i) {
    auto ui = static_cast<std::size_t>(i);
    if (f.faulty[ui]) continue;
    int comp = reach.view.component[ui];
    reach.included[ui] =
        reach.view.degree[ui] > 0 && component_capable[static_cast<std::size_t>(comp)];
    reach.isolated[ui] = g.degree(i) > 0 && reach.view.degree[ui] == 0;
  }
  return reach;
}

std::shared_ptr<const ModelContext> make_context(PlatformGraph g, AppRegistry reg, FaultState f,
                                                 std::optional<IntMatrix> x_old,
                                                 BuildOptions opts) {
  validate_faults(g, f);
  auto ctx = std::make_shared<ModelContext>();
  ctx->reach = compute_comm_reach(g, f, reg, opts);
  ctx->incidence = incidence_matrix(g);
  ctx->unoriented = unoriented_incidence(ctx->incidence);
  ctx->graph = std::move(g);
  ctx->registry = std::move(reg);
  ctx->faults = std::move(f);
  ctx->x_old = std::move(x_old);
  ctx->options = opts;
  return ctx;
}

void IlpModel::add_row(std::vector<Term> terms, Sense sense, long long rhs, RowFamily family) {
  for (const Term& t : terms)
    if (t.var < 0 || t.var >= layout.total()) throw InvalidArgument("row references invalid variable");
  rows.push_back(Row{std::move(terms), sense, rhs, family});
}

void IlpModel::fix(int var, int value) {
  lb.at(static_cast<std::size_t>(var)) = value;
  ub.at(static_cast<std::size_t>(var)) = value;
}

std::size_t IlpModel::count_rows(RowFamily family) const {
  std::size_t n = 0;
  for (const Row& r : rows)
    if (r.family == family) ++n;
  return n;
}

IlpModel make_empty_model(std::shared_ptr<const ModelContext> ctx) {
  if (!ctx) throw InvalidArgument("model context is null");
  const PlatformGraph& g = ctx->graph;
  const AppRegistry& reg = ctx->registry;
  IlpModel m;
  m.layout = VarLayout(g.n_cus(), g.n_paths(), reg.n_nodes(), reg.n_links(), reg.n_apps(),
                       reg.n_realloc());
  m.coef = compute_coefficients(reg, g);
  auto total = static_cast<std::size_t>(m.layout.total());
  m.c.assign(total, 0);
  m.lb.assign(total, 0);
  m.ub.assign(total, 1);
  for (int v = m.layout.comm_offset(); v < m.layout.hat_offset(); ++v)
    m.lb[static_cast<std::size_t>(v)] = -1;
  m.context = std::move(ctx);
  return m;
}

void build_objective(IlpModel& m) {
  const VarLayout& L = m.layout;
  for (int k = 0; k < L.n_apps(); ++k) m.c[static_cast<std::size_t>(L.r(k))] = m.coef.alpha[static_cast<std::size_t>(k)];
  for (int j = 0; j < L.n_nodes(); ++j) m.c[static_cast<std::size_t>(L.m(j))] = -(m.coef.beta + 1);
  for (int v = L.hat_offset(); v < L.total(); ++v) m.c[static_cast<std::size_t>(v)] = -1;
}

void add_partitioning_constraints(IlpModel& m) {
  const VarLayout& L = m.layout;
  const AppRegistry& reg = m.context->registry;
  for (int i = 0; i < L.n_cus(); ++i) {
    std::vector<Term> t;
    for (int j = 0; j < L.n_nodes(); ++j) t.push_back({L.xcn(i, j), 1});
    m.add_row(std::move(t), Sense::Le, 1, RowFamily::Partitioning);
  }
  for (int j = 0; j < L.n_nodes(); ++j) {
    std::vector<Term> t;
    for (int i = 0; i < L.n_cus(); ++i) t.push_back({L.xcn(i, j), 1});
    t.push_back({L.r(reg.node_app(j)), -1});
    m.add_row(std::move(t), Sense::Eq, 0, RowFamily::Partitioning);
  }
  for (int p = 0; p < L.n_paths(); ++p) {
    std::vector<Term> t;
    for (int l = 0; l < L.n_links(); ++l) t.push_back({L.xpl(p, l), 1});
    m.add_row(std::move(t), Sense::Le, 1, RowFamily::Partitioning);
  }
  for (int l = 0; l < L.n_links(); ++l) {
    std::vector<Term> t;
    for (int p = 0; p < L.n_paths(); ++p) t.push_back({L.xpl(p, l), 1});
    t.push_back({L.r(reg.link_app(l)), -1});
    m.add_row(std::move(t), Sense::Eq, 0, RowFamily::Partitioning);
  }
}

void add_compliance_constraints(IlpModel& m) {
  const VarLayout& L = m.layout;
  const ModelContext& ctx = *m.context;
  const IntMatrix& h = ctx.registry.block_incidence();
  for (int i = 0; i < L.n_cus(); ++i)
    for (int j = 0; j < L.n_links(); ++j) {
      std::vector<Term> t;
      for (int k = 0; k < L.n_nodes(); ++k)
        if (h.at(k, j) != 0) t.push_back({L.xcn(i, k), h.at(k, j)});
      for (int l = 0; l < L.n_paths(); ++l)
        if (ctx.unoriented.at(i, l) != 0) t.push_back({L.xpl(l, j), -ctx.unoriented.at(i, l)});
      m.add_row(std::move(t), Sense::Eq, 0, RowFamily::Compliance);
    }
}

void add_reallocation_constraints(IlpModel& m) {
  const ModelContext& ctx = *m.context;
  if (!ctx.x_old) return;  // initial allocation
  const VarLayout& L = m.layout;
  const IntMatrix& old = *ctx.x_old;
  if (old.rows() != L.n_cus() || old.cols() != L.n_nodes())
    throw InvalidArgument("previous allocation has wrong dimensions");
  for (int j = 0; j < L.n_nodes(); ++j) {
    int sum = 0;
    for (int i = 0; i < L.n_cus(); ++i) {
      int v = old.at(i, j);
      if (v != 0 && v != 1) throw InvalidArgument("previous allocation must be binary");
      sum += v;
    }
    if (sum > 1)
      throw InvalidArgument("previous allocation places node " + std::to_string(j) +
                            " on more than one CU");
  }
  for (int j = 0; j < L.n_nodes(); ++j)
    for (int i = 0; i < L.n_cus(); ++i) {
      if (old.at(i, j) != 1) continue;
      // (1 - r) + M + X = 1
      m.add_row({{L.r(ctx.registry.node_app(j)), -1}, {L.m(j), 1}, {L.xcn(i, j), 1}}, Sense::Eq, 0,
                RowFamily::Reallocation);
    }
}

void add_fault_constraints(IlpModel& m) {
  const VarLayout& L = m.layout;
  const ModelContext& ctx = *m.context;
  for (int i = 0; i < L.n_cus(); ++i) {
    auto ui = static_cast<std::size_t>(i);
    if (!ctx.faults.faulty[ui] && !ctx.reach.isolated[ui]) continue;
    std::vector<Term> t;
    for (int j = 0; j < L.n_nodes(); ++j) t.push_back({L.xcn(i, j), 1});
    m.add_row(std::move(t), Sense::Eq, 0, RowFamily::Fault);
  }
  // No broadcast may transit through dead hardware.
  for (int p = 0; p < L.n_paths(); ++p) {
    const Edge& e = ctx.graph.edge(p);
    if (!ctx.faults.faulty[static_cast<std::size_t>(e.tail)] &&
        !ctx.faults.faulty[static_cast<std::size_t>(e.head)])
      continue;
    for (int k = 0; k < L.n_realloc(); ++k)
      for (int j = 0; j < L.n_cus(); ++j) m.fix(L.xcomm(k, p, j), 0);
  }
}

void add_comm_constraints(IlpModel& m) {
  const VarLayout& L = m.layout;
  const ModelContext& ctx = *m.context;
  const AppRegistry& reg = ctx.registry;
  for (int k = 0; k < L.n_realloc(); ++k) {
    int alloc_node = reg.node_of_alloc(k);
    int alloc_r = L.r(reg.allocator_app(k));
    for (int j = 0; j < L.n_cus(); ++j) {
      bool sink = ctx.reach.included[static_cast<std::size_t>(j)];
      for (int i = 0; i < L.n_cus(); ++i) {
        std::vector<Term> t;
        for (const Neighbor& nb : ctx.graph.neighbors(i))
          t.push_back({L.xcomm(k, nb.path, j), ctx.incidence.at(i, nb.path)});
        if (sink && ctx.reach.included[static_cast<std::size_t>(i)]) {
          t.push_back({L.xcn(i, alloc_node), 1});
          if (i == j) t.push_back({alloc_r, -1});
        }
        m.add_row(std::move(t), Sense::Eq, 0, RowFamily::Communication);
      }
    }
  }
}

namespace {

// Mesh neighbor of a CU one column to the right (dir 0) or one row up
// (dir 1), or -1 when it would leave the mesh or cross a row boundary.
int mesh_step(const PlatformGraph& g, int cu, int dir) {
  int cols = g.n_row();
  int rows = g.rows();
  int row = cu / cols;
  int col = cu % cols;
  if (dir == 0) {
    if (col + 1 < cols) return cu + 1;
    return g.torus() && cols >= 3 ? row * cols : -1;
  }
  if (row + 1 < rows) return cu + cols;
  return g.torus() && rows >= 3 ? col : -1;
}

}  // namespace

void add_orientation_constraints(IlpModel& m) {
  const ModelContext& ctx = *m.context;
  if (!ctx.options.orientation) return;
  const VarLayout& L = m.layout;
  const AppRegistry& reg = ctx.registry;
  for (int k = 0; k < reg.n_apps(); ++k) {
    const AppSpec& s = reg.app(k);
    if (!s.is_grid() || s.node_count() < 2) continue;
    for (int a = 0; a < s.grid_rows; ++a)
      for (int b = 0; b < s.grid_cols; ++b) {
        int node = reg.node_offset(k) + a * s.grid_cols + b;
        for (int dir = 0; dir < 2; ++dir) {
          bool has_partner = dir == 0 ? b + 1 < s.grid_cols : a + 1 < s.grid_rows;
          if (!has_partner) continue;
          int partner = node + (dir == 0 ? 1 : s.grid_cols);
          for (int i = 0; i < L.n_cus(); ++i) {
            int t = mesh_step(ctx.graph, i, dir);
            if (t < 0) {
              m.ub[static_cast<std::size_t>(L.xcn(i, node))] = 0;
              continue;
            }
            m.add_row({{L.xcn(i, node), 1}, {L.xcn(t, partner), -1}}, Sense::Eq, 0,
                      RowFamily::Orientation);
          }
        }
      }
  }
}

void add_type_constraints(IlpModel& m) {
  const ModelContext& ctx = *m.context;
  if (!ctx.options.types) return;
  const VarLayout& L = m.layout;
  for (int j = 0; j < L.n_nodes(); ++j)
    for (int i = 0; i < L.n_cus(); ++i)
      if (ctx.graph.cu_types()[static_cast<std::size_t>(i)] != ctx.registry.node_type(j))
        m.ub[static_cast<std::size_t>(L.xcn(i, j))] = 0;
}

void add_abs_linearization(IlpModel& m) {
  const VarLayout& L = m.layout;
  for (int k = 0; k < L.n_realloc(); ++k)
    for (int j = 0; j < L.n_cus(); ++j)
      for (int p = 0; p < L.n_paths(); ++p) {
        int x = L.xcomm(k, p, j);
        int h = L.xhat(k, p, j);
        m.add_row({{x, 1}, {h, -1}}, Sense::Le, 0, RowFamily::Linearization);
        m.add_row({{x, -1}, {h, -1}}, Sense::Le, 0, RowFamily::Linearization);
      }
}

IlpModel build_model(std::shared_ptr<const ModelContext> ctx) {
  IlpModel m = make_empty_model(std::move(ctx));
  build_objective(m);
  add_partitioning_constraints(m);
  add_compliance_constraints(m);
  add_reallocation_constraints(m);
  add_fault_constraints(m);
  add_comm_constraints(m);
  add_orientation_constraints(m);
  add_type_constraints(m);
  add_abs_linearization(m);
  return m;
}

IlpModel build_model(const PlatformGraph& g, const AppRegistry& reg, const FaultState& f,
                     const std::optional<IntMatrix>& x_old, const BuildOptions& opts) {
  return build_model(make_context(g, reg, f, x_old, opts));
}

std::string dump_model(const IlpModel& m) {
  const VarLayout& L = m.layout;
  std::ostringstream out;
  out << "maximize\n";
  for (int v = 0; v < L.total(); ++v) {
    Wide c = m.c[static_cast<std::size_t>(v)];
    if (c != 0) out << "  " << (c > 0 ? "+" : "") << to_string(c) << ' ' << L.name(v) << '\n';
  }
  out << "subject to\n";
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    const Row& row = m.rows[r];
    out << "  R" << r << ':';
    if (row.terms.empty()) out << " 0";
    for (const Term& t : row.terms)
      out << ' ' << (t.coef > 0 ? "+" : "") << t.coef << ' ' << L.name(t.var);
    out << (row.sense == Sense::Le ? " <= " : " = ") << row.rhs << '\n';
  }
  out << "bounds\n";
  for (int v = 0; v < L.total(); ++v)
    out << "  " << m.lb[static_cast<std::size_t>(v)] << " <= " << L.name(v)
        << " <= " << m.ub[static_cast<std::size_t>(v)] << '\n';
  out << "end\n";
  return out.str();
}

Wide evaluate_objective(const IlpModel& m, const std::vector<int>& x) {
  if (x.size() != m.c.size()) throw InvalidArgument("solution length does not match layout");
  Wide total = 0;
  for (std::size_t v = 0; v < x.size(); ++v)
    if (x[v] != 0) total = checked_add(total, checked_mul(m.c[v], x[v]));
  return total;
}

}  // namespace nocr
