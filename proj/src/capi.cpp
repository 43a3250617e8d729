#include <nocrealloc/nocrealloc.h>

#include <cstring>
#include <sstream>

#include "scenario.hpp"
#include "simulator.hpp"
#include "theorems.hpp"

struct noc_scenario {
  nocr::Scenario s;
};

struct noc_result {
  nocr::IlpModel model;
  nocr::Solution solution;
};

struct noc_sim {
  nocr::Simulator sim;
};

namespace {

thread_local std::string g_error;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

noc_status fail(noc_status code, const std::string& msg) {
  g_error = msg;
  return code;
}

// Runs body and maps exceptions onto status codes; nothing escapes.
template <class F>
noc_status guarded(F&& body) {
  try {
    g_error.clear();
    return body();
  } catch (const nocr::OversizeError& e) {
    return fail(NOC_OVERSIZE, e.what());
  } catch (const nocr::OverflowError& e) {
    return fail(NOC_OVERFLOW, e.what());
  } catch (const nocr::InvalidArgument& e) {
    return fail(NOC_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(NOC_INTERNAL, e.what());
  } catch (...) {
    return fail(NOC_INTERNAL, "unknown error");
  }
}

noc_status put(char** out, const std::string& s) {
  *out = dup(s);
  return *out ? NOC_OK : fail(NOC_INTERNAL, "out of memory");
}

nocr::FaultState replayed_faults(const nocr::Scenario& s) {
  nocr::FaultState f = nocr::FaultState::healthy(s.rows * s.cols);
  for (const auto& e : s.faults)
    if (e.kind == nocr::FaultKind::Crash)
      f.faulty[static_cast<std::size_t>(e.cu)] = e.action == nocr::FaultAction::Inject;
  return f;
}

std::string json_ints(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out + "]";
}

}  // namespace

#define NOC_REQUIRE(cond, what) \
  if (!(cond)) return fail(NOC_INVALID_ARGUMENT, what)

extern "C" {

const char* noc_version(void) { return "0.1.0"; }

const char* noc_last_error(void) { return g_error.c_str(); }

void noc_string_free(char* s) { std::free(s); }

noc_status noc_set_log_level(noc_log_level level) {
  NOC_REQUIRE(level >= NOC_LOG_QUIET && level <= NOC_LOG_DEBUG, "unknown log level");
  nocr::set_log_level(static_cast<nocr::LogLevel>(level));
  return NOC_OK;
}

noc_status noc_scenario_load_file(const char* path, noc_scenario** out) {
  NOC_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new noc_scenario{nocr::load_scenario_file(path)};
    return NOC_OK;
  });
}

noc_status noc_scenario_load_string(const char* json, noc_scenario** out) {
  NOC_REQUIRE(json && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new noc_scenario{nocr::parse_scenario(json)};
    return NOC_OK;
  });
}

void noc_scenario_free(noc_scenario* s) { delete s; }

noc_status noc_scenario_set_orientation(noc_scenario* s, int enabled) {
  NOC_REQUIRE(s, "null scenario");
  s->s.build.orientation = enabled != 0;
  return NOC_OK;
}

noc_status noc_scenario_set_timeout_ms(noc_scenario* s, long long timeout_ms) {
  NOC_REQUIRE(s, "null scenario");
  NOC_REQUIRE(timeout_ms > 0, "timeout must be positive");
  s->s.solver.timeout_ms = timeout_ms;
  return NOC_OK;
}

noc_status noc_scenario_set_degraded_vote(noc_scenario* s, int enabled) {
  NOC_REQUIRE(s, "null scenario");
  s->s.sim.degraded_vote = enabled != 0;
  return NOC_OK;
}

noc_status noc_scenario_platform_dot(const noc_scenario* s, char** out) {
  NOC_REQUIRE(s && out, "null argument");
  return guarded([&] {
    auto g = s->s.graph();
    return put(out, nocr::to_dot(g, replayed_faults(s->s)));
  });
}

noc_status noc_solve(const noc_scenario* s, const char* x_old_json, noc_result** out) {
  NOC_REQUIRE(s && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto g = s->s.graph();
    auto reg = s->s.registry();
    std::optional<nocr::IntMatrix> x_old;
    if (x_old_json)
      x_old = nocr::parse_allocation(x_old_json, reg.n_nodes(), g.n_cus()).to_matrix(g.n_cus());
    nocr::IlpModel m = nocr::build_model(g, reg, replayed_faults(s->s), x_old, s->s.build);
    nocr::Solution sol = nocr::solve(m, s->s.solver);
    *out = new noc_result{std::move(m), std::move(sol)};
    return NOC_OK;
  });
}

noc_status noc_result_status(const noc_result* r, noc_solve_status* out) {
  NOC_REQUIRE(r && out, "null argument");
  switch (r->solution.status) {
    case nocr::SolveStatus::Optimal: *out = NOC_SOLVE_OPTIMAL; break;
    case nocr::SolveStatus::Infeasible: *out = NOC_SOLVE_INFEASIBLE; break;
    case nocr::SolveStatus::TimedOut: *out = NOC_SOLVE_TIMEOUT; break;
  }
  return NOC_OK;
}

noc_status noc_result_objective(const noc_result* r, char** out) {
  NOC_REQUIRE(r && out, "null argument");
  NOC_REQUIRE(r->solution.has_point, "result has no solution point");
  return guarded([&] { return put(out, nocr::to_string(r->solution.objective)); });
}

noc_status noc_result_report(const noc_result* r, char** out) {
  NOC_REQUIRE(r && out, "null argument");
  return guarded([&] {
    const auto& sol = r->solution;
    const auto& reg = r->model.context->registry;
    std::ostringstream s;
    s << "status " << nocr::to_string(sol.status) << '\n';
    if (sol.has_point) {
      s << "objective " << nocr::to_string(sol.objective) << '\n';
      auto running = nocr::extract_running(r->model, sol.x);
      auto alloc = nocr::extract_allocation(r->model, sol.x);
      for (int k = 0; k < reg.n_apps(); ++k) {
        s << "app " << reg.app(k).name << (running[static_cast<std::size_t>(k)] ? " running" : " dropped");
        if (running[static_cast<std::size_t>(k)]) {
          s << " on";
          for (int j : reg.app_nodes(k)) s << ' ' << alloc.host[static_cast<std::size_t>(j)];
        }
        s << '\n';
      }
    }
    return put(out, s.str());
  });
}

noc_status noc_result_hosts_json(const noc_result* r, char** out) {
  NOC_REQUIRE(r && out, "null argument");
  NOC_REQUIRE(r->solution.has_point, "result has no solution point");
  return guarded([&] {
    return put(out, "{\"hosts\":" + json_ints(nocr::extract_allocation(r->model, r->solution.x).host) + "}");
  });
}

noc_status noc_result_variables(const noc_result* r, char** out) {
  NOC_REQUIRE(r && out, "null argument");
  return guarded([&] { return put(out, nocr::dump_solution(r->model, r->solution)); });
}

noc_status noc_result_model_dump(const noc_result* r, char** out) {
  NOC_REQUIRE(r && out, "null argument");
  return guarded([&] { return put(out, nocr::dump_model(r->model)); });
}

void noc_result_free(noc_result* r) { delete r; }

noc_status noc_verify(const noc_scenario* s, int corrupt, char** json_out, int* all_hold) {
  NOC_REQUIRE(s && json_out && all_hold, "null argument");
  return guarded([&] {
    auto g = s->s.graph();
    auto reg = s->s.registry();
    nocr::Coefficients coef = nocr::compute_coefficients(reg, g);
    std::optional<nocr::Wide> move_weight;
    if (corrupt) {
      // Boundary values: the strict inequalities must now fail.
      coef.alpha.back() = (coef.beta + 1) * reg.n_nodes() + coef.beta;
      move_weight = coef.beta;
    }
    std::vector<nocr::TheoremReport> reports = {
        nocr::check_theorem_1(coef, reg), nocr::check_theorem_2(coef, move_weight), nocr::check_theorem_3(coef),
        nocr::check_lemma_alpha(coef), nocr::check_fact_nnodes(reg)};
    *all_hold = 1;
    for (const auto& r : reports)
      if (!r.holds) *all_hold = 0;
    return put(json_out, nocr::to_json(reports));
  });
}

noc_status noc_oracle_check(const noc_scenario* s, int max_faults, char** report, int* passed) {
  NOC_REQUIRE(s && report && passed, "null argument");
  NOC_REQUIRE(max_faults >= 0, "max_faults must be >= 0");
  return guarded([&] {
    auto g = s->s.graph();
    auto reg = s->s.registry();
    nocr::CrossCheck c = nocr::cross_check_solver(g, reg, max_faults, s->s.build, s->s.solver);
    *passed = c.passed() ? 1 : 0;
    std::ostringstream o;
    o << "cases " << c.cases << '\n' << "mismatches " << c.mismatches << '\n';
    if (!c.passed()) o << "first " << c.first_failure << '\n';
    o << (c.passed() ? "PASS" : "FAIL") << '\n';
    return put(report, o.str());
  });
}

noc_status noc_sim_create(const noc_scenario* s, noc_sim** out) {
  NOC_REQUIRE(s && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new noc_sim{nocr::Simulator(s->s)};
    return NOC_OK;
  });
}

noc_status noc_sim_run(noc_sim* sim) {
  NOC_REQUIRE(sim, "null simulation");
  return guarded([&] {
    sim->sim.run();
    return NOC_OK;
  });
}

noc_status noc_sim_fault(noc_sim* sim, int cu, const char* kind, int inject) {
  NOC_REQUIRE(sim && kind, "null argument");
  return guarded([&] {
    auto k = nocr::parse_fault_kind(kind);
    if (inject)
      sim->sim.inject_fault(cu, k);
    else
      sim->sim.recover(cu, k);
    return NOC_OK;
  });
}

noc_status noc_sim_step(noc_sim* sim, int ticks) {
  NOC_REQUIRE(sim, "null simulation");
  NOC_REQUIRE(ticks >= 0, "ticks must be >= 0");
  return guarded([&] {
    for (int i = 0; i < ticks; ++i) sim->sim.step();
    return NOC_OK;
  });
}

noc_status noc_sim_settle(noc_sim* sim) {
  NOC_REQUIRE(sim, "null simulation");
  return guarded([&] {
    sim->sim.settle();
    return NOC_OK;
  });
}

long long noc_sim_tick(const noc_sim* sim) { return sim ? sim->sim.tick() : -1; }

noc_status noc_sim_grid(const noc_sim* sim, char** out) {
  NOC_REQUIRE(sim && out, "null argument");
  return guarded([&] { return put(out, sim->sim.render_grid()); });
}

noc_status noc_sim_trace(const noc_sim* sim, char** out) {
  NOC_REQUIRE(sim && out, "null argument");
  return guarded([&] { return put(out, sim->sim.trace_jsonl()); });
}

noc_status noc_sim_csv(const noc_sim* sim, char** out) {
  NOC_REQUIRE(sim && out, "null argument");
  return guarded([&] { return put(out, sim->sim.csv()); });
}

noc_status noc_sim_summary(const noc_sim* sim, char** out) {
  NOC_REQUIRE(sim && out, "null argument");
  return guarded([&] { return put(out, sim->sim.summary_json()); });
}

void noc_sim_free(noc_sim* sim) { delete sim; }

}  // extern "C"
