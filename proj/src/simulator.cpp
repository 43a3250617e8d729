#include "simulator.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

namespace nocr {

namespace {

using nlohmann::json;

struct Grouping {
  std::optional<std::size_t> winner;  // index of the winning group's first member
  std::vector<int> minority;
  bool quorum = false;
};

template <class T, class Agree>
Grouping group_vote(const std::vector<std::optional<T>>& values, Agree agree, bool degraded) {
  if (values.empty()) throw InvalidArgument("vote over no replicas");
  std::vector<std::vector<std::size_t>> groups;
  std::size_t present = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) continue;
    ++present;
    auto fits = [&](const std::vector<std::size_t>& g) {
      return std::all_of(g.begin(), g.end(), [&](std::size_t m) { return agree(*values[m], *values[i]); });
    };
    auto it = std::find_if(groups.begin(), groups.end(), fits);
    if (it == groups.end())
      groups.push_back({i});
    else
      it->push_back(i);
  }
  Grouping out;
  if (groups.empty()) return out;
  // Groups are ordered by first member, so the first largest one wins ties.
  auto best = groups.begin();
  for (auto it = groups.begin(); it != groups.end(); ++it)
    if (it->size() > best->size()) best = it;
  std::size_t threshold = (values.size() + 2) / 2;
  out.quorum = best->size() >= threshold || (degraded && present == 1);
  if (!out.quorum) return out;
  out.winner = best->front();
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] && std::find(best->begin(), best->end(), i) == best->end())
      out.minority.push_back(static_cast<int>(i));
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

VoteResult majority_vote(const std::vector<std::optional<double>>& values, double tol, bool degraded) {
  if (tol < 0) throw InvalidArgument("vote tolerance must be >= 0");
  Grouping g = group_vote(values, [tol](double a, double b) { return std::abs(a - b) <= tol; }, degraded);
  VoteResult r;
  r.quorum_met = g.quorum;
  r.minority = std::move(g.minority);
  if (g.winner) r.output = values[*g.winner];
  return r;
}

VoteResult majority_vote(const std::vector<double>& values, double tol, bool degraded) {
  return majority_vote(std::vector<std::optional<double>>(values.begin(), values.end()), tol, degraded);
}

AllocationVote vote_allocations(const std::vector<std::optional<std::vector<int>>>& values, bool degraded) {
  Grouping g = group_vote(
      values, [](const std::vector<int>& a, const std::vector<int>& b) { return a == b; }, degraded);
  AllocationVote r;
  r.quorum_met = g.quorum;
  r.minority = std::move(g.minority);
  if (g.winner) r.output = values[*g.winner];
  return r;
}

PlantState make_plant(const PlantParams& p) {
  PlantState s;
  s.reference = p.reference;
  s.gain_kp = p.gain_kp;
  s.time_constant = p.time_constant;
  s.max_thrust = p.max_thrust;
  return s;
}

ControllerOutcome controller_step(const PlantState& plant, const std::vector<bool>& running,
                                  const std::vector<bool>& corrupted, double tol, double offset, bool degraded) {
  if (running.size() != corrupted.size()) throw InvalidArgument("controller masks differ in length");
  ControllerOutcome out;
  out.plant = plant;
  double u = std::clamp(plant.gain_kp * (plant.reference - plant.thrust), 0.0, 1.0);
  for (std::size_t i = 0; i < running.size(); ++i) {
    if (!running[i]) {
      out.values.emplace_back();
      continue;
    }
    out.values.emplace_back(corrupted[i] ? u + offset * static_cast<double>(1 + i) : u);
  }
  if (out.values.empty()) {
    out.plant.command_valid = false;
    return out;
  }
  out.vote = majority_vote(out.values, tol, degraded);
  out.plant.command_valid = out.vote.quorum_met;
  if (out.vote.output) out.plant.command = std::clamp(*out.vote.output, 0.0, 1.0);
  return out;
}

PlantState plant_step(const PlantState& plant, double dt) {
  if (!(dt > 0)) throw InvalidArgument("plant step needs dt > 0");
  PlantState next = plant;
  double u = plant.command_valid ? plant.command : 0.0;
  next.thrust = plant.thrust + dt / plant.time_constant * (u * plant.max_thrust - plant.thrust);
  return next;
}

Simulator::Simulator(Scenario scenario)
    : scenario_(std::move(scenario)), graph_(scenario_.graph()), registry_(scenario_.registry()) {
  layout_ = VarLayout(graph_.n_cus(), graph_.n_paths(), registry_.n_nodes(), registry_.n_links(),
                      registry_.n_apps(), registry_.n_realloc());
  if (registry_.n_realloc() < 1 || registry_.n_realloc() % 2 == 0)
    throw InvalidArgument("simulation needs an odd number of allocator replicas");
  faults_ = FaultState::healthy(graph_.n_cus());
  detected_.assign(static_cast<std::size_t>(graph_.n_cus()), false);
  running_.assign(static_cast<std::size_t>(registry_.n_apps()), 0);
  plant_ = make_plant(scenario_.plant);
  t_end_ = (scenario_.faults.empty() ? 0 : scenario_.faults.back().t) + scenario_.sim.settle_ticks;
  csv_rows_.push_back("t,thrust,command");
}

FaultState Simulator::known_faults() const {
  FaultState f = faults_;
  for (std::size_t i = 0; i < f.faulty.size(); ++i) f.faulty[i] = f.faulty[i] || detected_[i];
  return f;
}

void Simulator::emit(const std::string& kind, const std::string& payload) {
  // Keys in sorted order, matching the rest of the JSON output.
  trace_.push_back("{\"kind\":" + json(kind).dump() + ",\"payload\":" + payload + ",\"t\":" + std::to_string(t_) +
                   "}");
}

int Simulator::host_of(int app, int node_in_app) const {
  if (!current_) return -1;
  return current_->host[static_cast<std::size_t>(registry_.node_offset(app) + node_in_app)];
}

void Simulator::inject_fault(int cu, FaultKind kind) { apply_fault(cu, kind, FaultAction::Inject); }

void Simulator::recover(int cu, FaultKind kind) { apply_fault(cu, kind, FaultAction::Recover); }

void Simulator::apply_fault(int cu, FaultKind kind, FaultAction action) {
  if (cu < 0 || cu >= graph_.n_cus()) throw InvalidArgument("no CU " + std::to_string(cu));
  auto c = static_cast<std::size_t>(cu);
  json p = {{"cu", cu}, {"kind", to_string(kind)}};
  if (action == FaultAction::Inject) {
    if (kind == FaultKind::Crash) {
      p["noop"] = static_cast<bool>(faults_.faulty[c]);
      if (!faults_.faulty[c]) dirty_ = true;
      faults_.faulty[c] = true;
    } else {
      p["noop"] = static_cast<bool>(faults_.comp_fault[c]);
      faults_.comp_fault[c] = true;  // invisible until a vote exposes it
    }
    p["source"] = "injected";
    emit("fault", p.dump());
    return;
  }
  if (kind == FaultKind::Crash) {
    p["noop"] = !faults_.faulty[c];
    if (faults_.faulty[c]) dirty_ = true;
    faults_.faulty[c] = false;
  } else {
    p["noop"] = !faults_.comp_fault[c] && !detected_[c];
    faults_.comp_fault[c] = false;
    if (detected_[c]) {
      detected_[c] = false;
      dirty_ = true;
    }
  }
  emit("recover", p.dump());
}

void Simulator::apply_pending() {
  if (!pending_) return;
  Pending p = std::move(*pending_);
  pending_.reset();

  Allocation next;
  next.host.assign(static_cast<std::size_t>(registry_.n_nodes()), -1);
  for (int j = 0; j < registry_.n_nodes(); ++j)
    for (int i = 0; i < graph_.n_cus(); ++i)
      if (p.x[static_cast<std::size_t>(layout_.xcn(i, j))] == 1) next.host[static_cast<std::size_t>(j)] = i;
  std::vector<int> run(static_cast<std::size_t>(registry_.n_apps()));
  for (int k = 0; k < registry_.n_apps(); ++k)
    run[static_cast<std::size_t>(k)] = p.x[static_cast<std::size_t>(layout_.r(k))];

  emit("apply", json{{"hosts", next.host},
                     {"running", run},
                     {"objective", p.objective},
                     {"violations", p.violations},
                     {"broadcast_hops", p.hops}}
                    .dump());
  for (int k = 0; k < registry_.n_apps(); ++k) {
    auto uk = static_cast<std::size_t>(k);
    if (running_[uk] == 1 && run[uk] == 0) {
      emit("drop", json{{"app", registry_.app(k).name}, {"rank", k + 1}}.dump());
      ++stats_.drops;
    }
  }
  if (current_) {
    for (int j = 0; j < registry_.n_nodes(); ++j) {
      int from = current_->host[static_cast<std::size_t>(j)];
      int to = next.host[static_cast<std::size_t>(j)];
      if (from < 0 || to < 0 || from == to) continue;
      emit("realloc",
           json{{"node", j}, {"app", registry_.app(registry_.node_app(j)).name}, {"from", from}, {"to", to}}.dump());
      ++stats_.reallocations;
    }
  }
  applied_.push_back({t_, p.x, p.violations});
  current_ = std::move(next);
  running_ = std::move(run);
  ++stats_.applies;
}

void Simulator::control() {
  std::vector<int> ctrl = registry_.controller_apps();
  if (ctrl.empty()) {
    plant_.command_valid = false;
    commands_.emplace_back();
    return;
  }
  std::vector<bool> live(ctrl.size(), false);
  std::vector<bool> corrupt(ctrl.size(), false);
  std::vector<int> hosts(ctrl.size(), -1);
  for (std::size_t i = 0; i < ctrl.size(); ++i) {
    // A controller computes on the CU of its first node.
    int h = running_[static_cast<std::size_t>(ctrl[i])] ? host_of(ctrl[i], 0) : -1;
    hosts[i] = h;
    if (h < 0 || faults_.faulty[static_cast<std::size_t>(h)]) continue;
    live[i] = true;
    corrupt[i] = faults_.comp_fault[static_cast<std::size_t>(h)];
  }
  const SimOptions& o = scenario_.sim;
  ControllerOutcome out = controller_step(plant_, live, corrupt, o.vote_tolerance, o.corruption_offset, o.degraded_vote);
  plant_ = out.plant;
  json values = json::array();
  for (const auto& v : out.values) values.push_back(optional_number(v));
  std::optional<double> cmd;
  if (plant_.command_valid) cmd = plant_.command;
  emit("controller", json{{"values", values},
                          {"command", optional_number(cmd)},
                          {"quorum", out.vote.quorum_met},
                          {"minority", out.vote.minority}}
                         .dump());
  commands_.push_back(cmd);
  for (int i : out.vote.minority) {
    auto h = static_cast<std::size_t>(hosts[static_cast<std::size_t>(i)]);
    if (detected_[h]) continue;
    detected_[h] = true;
    dirty_ = true;
    emit("fault", json{{"cu", hosts[static_cast<std::size_t>(i)]},
                       {"kind", "computational"},
                       {"source", "controller vote"},
                       {"noop", false}}
                      .dump());
  }
}

void Simulator::solve_round(bool bootstrap) {
  dirty_ = false;
  if (!current_) bootstrap = true;  // nothing applied yet, e.g. a timed-out first round
  const int n = registry_.n_realloc();
  FaultState known = known_faults();
  std::optional<IntMatrix> x_old;
  if (current_) x_old = current_->to_matrix(graph_.n_cus());

  ReplicaRound round;
  round.t = t_;
  round.outputs.resize(static_cast<std::size_t>(n));
  round.corrupted.assign(static_cast<std::size_t>(n), false);
  std::optional<IlpModel> audit;
  std::vector<int> hosts(static_cast<std::size_t>(n), -1);
  bool any = false;

  for (int k = 0; k < n; ++k) {
    auto uk = static_cast<std::size_t>(k);
    int h = -1;
    if (!bootstrap) {
      if (!running_[static_cast<std::size_t>(registry_.allocator_app(k))]) continue;
      h = current_->host[static_cast<std::size_t>(registry_.node_of_alloc(k))];
      if (h < 0 || faults_.faulty[static_cast<std::size_t>(h)]) continue;
    }
    hosts[uk] = h;
    any = true;
    // Every replica builds and solves its own copy of the problem.
    IlpModel m = build_model(graph_, registry_, known, x_old, scenario_.build);
    Solution s = solve(m, scenario_.solver);
    ++stats_.solves;
    json p = {{"replica", k}, {"host", h}, {"status", to_string(s.status)}, {"nodes", s.nodes}};
    if (s.status == SolveStatus::Optimal) {
      std::vector<int> x = std::move(s.x);
      if (h >= 0 && faults_.comp_fault[static_cast<std::size_t>(h)]) {
        x[0] ^= 1;
        round.corrupted[uk] = true;
      }
      p["objective"] = to_string(s.objective);
      p["hosts"] = extract_allocation(m, x).host;
      p["running"] = extract_running(m, x);
      round.outputs[uk] = std::move(x);
    }
    emit("solve", p.dump());
    if (!audit) audit = std::move(m);
  }
  if (!any) return;

  AllocationVote v = vote_allocations(round.outputs, scenario_.sim.degraded_vote);
  rounds_.push_back(round);
  emit("vote", json{{"target", "allocation"}, {"quorum", v.quorum_met}, {"minority", v.minority}}.dump());
  for (int k : v.minority) {
    int h = hosts[static_cast<std::size_t>(k)];
    if (h < 0 || detected_[static_cast<std::size_t>(h)]) continue;
    detected_[static_cast<std::size_t>(h)] = true;
    dirty_ = true;
    emit("fault", json{{"cu", h}, {"kind", "computational"}, {"source", "allocator vote"}, {"noop", false}}.dump());
  }
  if (!v.quorum_met) {
    ++stats_.failed_votes;
    return;
  }
  Pending p;
  p.x = std::move(*v.output);
  p.violations = check_feasible(*audit, p.x).size();
  p.objective = to_string(evaluate_objective(*audit, p.x));
  for (int k = 0; k < n; ++k) {
    long long hops = 0;
    for (int c = 0; c < graph_.n_cus(); ++c)
      for (int q = 0; q < graph_.n_paths(); ++q) hops += p.x[static_cast<std::size_t>(layout_.xhat(k, q, c))];
    p.hops.push_back(hops);
  }
  pending_ = std::move(p);
}

void Simulator::step() {
  if (!booted_) {
    booted_ = true;
    solve_round(true);
  }
  apply_pending();
  const auto& events = scenario_.faults;
  while (next_fault_ < events.size() && events[next_fault_].t <= t_) {
    const FaultEvent& e = events[next_fault_++];
    apply_fault(e.cu, e.kind, e.action);
  }
  control();
  plant_ = plant_step(plant_, scenario_.plant.dt);
  thrusts_.push_back(plant_.thrust);
  std::optional<double> cmd;
  if (plant_.command_valid) cmd = plant_.command;
  emit("plant", json{{"thrust", plant_.thrust}, {"command", optional_number(cmd)}}.dump());
  {
    std::ostringstream row;
    row.precision(17);
    row << t_ << ',' << plant_.thrust << ',';
    if (cmd) row << *cmd;
    csv_rows_.push_back(row.str());
  }
  if (dirty_) solve_round(false);
  ++t_;
}

void Simulator::settle(int max_ticks) {
  for (int i = 0; i < max_ticks; ++i) {
    step();
    if (!dirty_ && !pending_) break;
  }
}

void Simulator::run() {
  while (!finished()) step();
}

std::string Simulator::trace_jsonl() const {
  std::string out;
  for (const auto& line : trace_) out += line + '\n';
  return out;
}

std::string Simulator::csv() const {
  std::string out;
  for (const auto& row : csv_rows_) out += row + '\n';
  return out;
}

std::string Simulator::render_grid() const {
  FaultState known = known_faults();
  std::string out;
  for (int r = 0; r < graph_.rows(); ++r) {
    for (int c = 0; c < graph_.n_row(); ++c) {
      int cu = r * graph_.n_row() + c;
      char ch = '.';
      if (known.faulty[static_cast<std::size_t>(cu)]) {
        ch = '#';
      } else if (current_) {
        for (int j = 0; j < registry_.n_nodes(); ++j)
          if (current_->host[static_cast<std::size_t>(j)] == cu) ch = registry_.app(registry_.node_app(j)).name[0];
      }
      out += ch;
    }
    out += '\n';
  }
  return out;
}

SimSummary Simulator::summary() const {
  SimSummary s = stats_;
  s.ticks = t_;
  s.events = trace_.size();
  s.running = running_;
  if (current_) s.hosts = current_->host;
  return s;
}

std::string Simulator::summary_json() const {
  SimSummary s = summary();
  json running_names = json::array();
  for (int k = 0; k < registry_.n_apps(); ++k)
    if (s.running[static_cast<std::size_t>(k)]) running_names.push_back(registry_.app(k).name);
  return json{{"ticks", s.ticks},
              {"events", s.events},
              {"solves", s.solves},
              {"applies", s.applies},
              {"drops", s.drops},
              {"reallocations", s.reallocations},
              {"failed_votes", s.failed_votes},
              {"running", running_names},
              {"hosts", s.hosts}}
      .dump();
}

std::string run_scenario(const Scenario& scenario) {
  Simulator sim(scenario);
  sim.run();
  return sim.trace_jsonl();
}

}  // namespace nocr
