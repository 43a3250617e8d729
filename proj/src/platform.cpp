#include "platform.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace nocr {

PlatformGraph::PlatformGraph(int n_cus, std::vector<Edge> edges, int n_row, bool torus,
                             std::vector<int> cu_types)
    : n_cus_(n_cus), edges_(std::move(edges)), n_row_(n_row), torus_(torus),
      cu_types_(std::move(cu_types)) {
  if (n_cus < 0) throw InvalidArgument("negative CU count");
  if (cu_types_.empty()) cu_types_.assign(static_cast<std::size_t>(n_cus), 0);
  if (static_cast<int>(cu_types_.size()) != n_cus)
    throw InvalidArgument("cu_types length does not match CU count");

  std::set<std::pair<int, int>> seen;
  adjacency_.resize(static_cast<std::size_t>(n_cus));
  for (int p = 0; p < n_paths(); ++p) {
    const Edge& e = edges_[static_cast<std::size_t>(p)];
    if (e.tail < 0 || e.tail >= n_cus || e.head < 0 || e.head >= n_cus)
      throw InvalidArgument("edge endpoint out of range");
    if (e.tail == e.head) throw InvalidArgument("self-loop edge");
    auto key = std::minmax(e.tail, e.head);
    if (!seen.insert({key.first, key.second}).second)
      throw InvalidArgument("duplicate edge between CUs " + std::to_string(key.first) +
                            " and " + std::to_string(key.second));
    adjacency_[static_cast<std::size_t>(e.tail)].push_back({e.head, p});
    adjacency_[static_cast<std::size_t>(e.head)].push_back({e.tail, p});
  }
  for (auto& adj : adjacency_)
    std::sort(adj.begin(), adj.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.cu < b.cu; });
}

std::optional<int> PlatformGraph::path_between(int a, int b) const {
  for (const Neighbor& n : neighbors(a))
    if (n.cu == b) return n.path;
  return std::nullopt;
}

PlatformGraph PlatformGraph::with_cu_types(std::vector<int> cu_types) const {
  return PlatformGraph(n_cus_, edges_, n_row_, torus_, std::move(cu_types));
}

PlatformGraph build_mesh(int rows, int cols, bool torus) {
  if (rows < 1 || cols < 1) throw InvalidArgument("mesh dimensions must be positive");
  std::vector<Edge> edges;
  for (int i = 0; i < rows * cols; ++i) {
    int row = i / cols;
    int col = i % cols;
    if (col + 1 < cols)
      edges.push_back({i, i + 1});
    else if (torus && cols >= 3)
      edges.push_back({i, row * cols});
    if (row + 1 < rows)
      edges.push_back({i, i + cols});
    else if (torus && rows >= 3)
      edges.push_back({i, col});
  }
  return PlatformGraph(rows * cols, std::move(edges), cols, torus);
}

IntMatrix incidence_matrix(const PlatformGraph& g) {
  IntMatrix m(g.n_cus(), g.n_paths());
  for (int p = 0; p < g.n_paths(); ++p) {
    m.at(g.edge(p).tail, p) = -1;
    m.at(g.edge(p).head, p) = 1;
  }
  return m;
}

IntMatrix unoriented_incidence(const IntMatrix& incidence) {
  IntMatrix out(incidence.rows(), incidence.cols());
  for (int i = 0; i < incidence.rows(); ++i)
    for (int j = 0; j < incidence.cols(); ++j) {
      int v = incidence.at(i, j);
      if (v < -1 || v > 1) throw InvalidArgument("incidence entry outside {-1,0,1}");
      out.at(i, j) = v < 0 ? -v : v;
    }
  return out;
}

FaultState FaultState::healthy(int n_cus) {
  FaultState f;
  f.faulty.assign(static_cast<std::size_t>(n_cus), false);
  f.comp_fault.assign(static_cast<std::size_t>(n_cus), false);
  return f;
}

int FaultState::faulty_count() const {
  return static_cast<int>(std::count(faulty.begin(), faulty.end(), true));
}

void validate_faults(const PlatformGraph& g, const FaultState& f) {
  if (static_cast<int>(f.faulty.size()) != g.n_cus() ||
      static_cast<int>(f.comp_fault.size()) != g.n_cus())
    throw InvalidArgument("fault state length does not match CU count");
}

HealthyView effective_degree_and_reachability(const PlatformGraph& g, const FaultState& f) {
  validate_faults(g, f);
  const auto n = static_cast<std::size_t>(g.n_cus());
  HealthyView view;
  view.degree.assign(n, 0);
  view.component.assign(n, -1);
  for (int i = 0; i < g.n_cus(); ++i) {
    if (f.faulty[static_cast<std::size_t>(i)]) continue;
    for (const Neighbor& nb : g.neighbors(i))
      if (!f.faulty[static_cast<std::size_t>(nb.cu)]) ++view.degree[static_cast<std::size_t>(i)];
  }
  for (int start = 0; start < g.n_cus(); ++start) {
    if (f.faulty[static_cast<std::size_t>(start)] ||
        view.component[static_cast<std::size_t>(start)] >= 0)
      continue;
    int id = static_cast<int>(view.components.size());
    std::vector<int> members;
    std::queue<int> q;
    q.push(start);
    view.component[static_cast<std::size_t>(start)] = id;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      members.push_back(u);
      for (const Neighbor& nb : g.neighbors(u)) {
        auto v = static_cast<std::size_t>(nb.cu);
        if (f.faulty[v] || view.component[v] >= 0) continue;
        view.component[v] = id;
        q.push(nb.cu);
      }
    }
    std::sort(members.begin(), members.end());
    view.components.push_back(std::move(members));
  }
  return view;
}

std::string to_dot(const PlatformGraph& g, const FaultState& f) {
  validate_faults(g, f);
  std::ostringstream out;
  out << "graph platform {\n";
  for (int i = 0; i < g.n_cus(); ++i) {
    bool bad = f.faulty[static_cast<std::size_t>(i)];
    out << "  cu" << i << " [label=\"" << i << (bad ? " faulty" : " healthy") << "\"";
    if (bad) out << ", style=filled, fillcolor=gray";
    out << "];\n";
  }
  for (const Edge& e : g.edges()) out << "  cu" << e.tail << " -- cu" << e.head << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace nocr
