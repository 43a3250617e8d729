// noc-realloc: command-line front end over the C library.

#include <nocrealloc/nocrealloc.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

namespace {

// Exit codes. solve: 0 optimal, 2 infeasible, 3 timeout.
// verify and oracle-check: 0 pass, 4 a check failed. Errors: 1.
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitTimeout = 3;
constexpr int kExitCheckFailed = 4;

struct CliError {
  std::string message;
};

void check(noc_status st) {
  if (st != NOC_OK) throw CliError{noc_last_error()};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  noc_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{"cannot read '" + path + "'"};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw CliError{"cannot write '" + path + "'"};
}

struct ScenarioDeleter {
  void operator()(noc_scenario* s) const { noc_scenario_free(s); }
};
struct ResultDeleter {
  void operator()(noc_result* r) const { noc_result_free(r); }
};
struct SimDeleter {
  void operator()(noc_sim* s) const { noc_sim_free(s); }
};
using ScenarioPtr = std::unique_ptr<noc_scenario, ScenarioDeleter>;
using ResultPtr = std::unique_ptr<noc_result, ResultDeleter>;
using SimPtr = std::unique_ptr<noc_sim, SimDeleter>;

struct Common {
  bool orientation = false;
  bool no_orientation = false;
  long long timeout_ms = 0;
  bool degraded_vote = false;
  bool seedless = false;
  long long seed = 0;
};

ScenarioPtr load(const std::string& path, const Common& c) {
  noc_scenario* raw = nullptr;
  check(noc_scenario_load_file(path.c_str(), &raw));
  ScenarioPtr s(raw);
  if (c.orientation) check(noc_scenario_set_orientation(s.get(), 1));
  if (c.no_orientation) check(noc_scenario_set_orientation(s.get(), 0));
  if (c.timeout_ms > 0) check(noc_scenario_set_timeout_ms(s.get(), c.timeout_ms));
  if (c.degraded_vote) check(noc_scenario_set_degraded_vote(s.get(), 1));
  return s;
}

int cmd_solve(const Common& c, const std::string& path, const std::string& x_old_path, bool dump_model,
              bool dump_vars) {
  ScenarioPtr s = load(path, c);
  std::string x_old;
  if (!x_old_path.empty()) x_old = read_file(x_old_path);
  noc_result* raw = nullptr;
  check(noc_solve(s.get(), x_old_path.empty() ? nullptr : x_old.c_str(), &raw));
  ResultPtr r(raw);
  char* text = nullptr;
  if (dump_model) {
    check(noc_result_model_dump(r.get(), &text));
    std::cout << take(text);
  }
  check(noc_result_report(r.get(), &text));
  std::cout << take(text);
  noc_solve_status st;
  check(noc_result_status(r.get(), &st));
  if (st == NOC_SOLVE_OPTIMAL) {
    check(noc_result_hosts_json(r.get(), &text));
    std::cout << take(text) << '\n';
  }
  if (dump_vars) {
    check(noc_result_variables(r.get(), &text));
    std::cout << take(text);
  }
  if (st == NOC_SOLVE_INFEASIBLE) return kExitInfeasible;
  if (st == NOC_SOLVE_TIMEOUT) return kExitTimeout;
  return 0;
}

int cmd_simulate(const Common& c, const std::string& path, const std::string& trace_path,
                 const std::string& csv_path) {
  ScenarioPtr s = load(path, c);
  noc_sim* raw = nullptr;
  check(noc_sim_create(s.get(), &raw));
  SimPtr sim(raw);
  check(noc_sim_run(sim.get()));
  char* text = nullptr;
  check(noc_sim_trace(sim.get(), &text));
  std::string trace = take(text);
  if (trace_path.empty() || trace_path == "-")
    std::cout << trace;
  else
    write_file(trace_path, trace);
  if (!csv_path.empty()) {
    check(noc_sim_csv(sim.get(), &text));
    write_file(csv_path, take(text));
  }
  std::ostream& info = trace_path.empty() || trace_path == "-" ? std::cerr : std::cout;
  check(noc_sim_summary(sim.get(), &text));
  info << take(text) << '\n';
  check(noc_sim_grid(sim.get(), &text));
  info << take(text);
  return 0;
}

int cmd_verify(const Common& c, const std::string& path, bool corrupt) {
  ScenarioPtr s = load(path, c);
  char* text = nullptr;
  int all = 0;
  check(noc_verify(s.get(), corrupt ? 1 : 0, &text, &all));
  std::cout << take(text) << '\n';
  return all ? 0 : kExitCheckFailed;
}

int cmd_oracle_check(const Common& c, const std::string& path, int max_faults) {
  ScenarioPtr s = load(path, c);
  char* text = nullptr;
  int passed = 0;
  check(noc_oracle_check(s.get(), max_faults, &text, &passed));
  std::cout << take(text);
  return passed ? 0 : kExitCheckFailed;
}

int cmd_dot(const Common& c, const std::string& path) {
  ScenarioPtr s = load(path, c);
  char* text = nullptr;
  check(noc_scenario_platform_dot(s.get(), &text));
  std::cout << take(text);
  return 0;
}

void show(noc_sim* sim) {
  char* text = nullptr;
  check(noc_sim_grid(sim, &text));
  std::cout << "t=" << noc_sim_tick(sim) << '\n' << take(text);
}

int cmd_repl(const Common& c, const std::string& path) {
  ScenarioPtr s = load(path, c);
  noc_sim* raw = nullptr;
  check(noc_sim_create(s.get(), &raw));
  SimPtr sim(raw);
  check(noc_sim_settle(sim.get()));
  show(sim.get());
  std::string line;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    std::istringstream in(line);
    std::string cmd;
    if (!(in >> cmd)) continue;
    try {
      if (cmd == "quit" || cmd == "exit") return 0;
      if (cmd == "help") {
        std::cout << "fault <cu> [crash|computational]\nrecover <cu> [crash|computational]\n"
                     "step [n]\nshow\nquit\n";
      } else if (cmd == "fault" || cmd == "recover") {
        int cu = -1;
        std::string kind = "crash";
        if (!(in >> cu)) throw CliError{"usage: " + cmd + " <cu> [crash|computational]"};
        in >> kind;
        check(noc_sim_fault(sim.get(), cu, kind.c_str(), cmd == "fault" ? 1 : 0));
        check(noc_sim_settle(sim.get()));
        show(sim.get());
      } else if (cmd == "step") {
        int n = 1;
        in >> n;
        check(noc_sim_step(sim.get(), n));
        show(sim.get());
      } else if (cmd == "show") {
        show(sim.get());
      } else {
        std::cout << "error: unknown command '" << cmd << "' (try help)\n";
      }
    } catch (const CliError& e) {
      std::cout << "error: " << e.message << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-tolerant reallocation of applications on a mesh of computing units"};
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  auto* o_on = app.add_flag("--orientation", c.orientation, "Enforce application orientation");
  auto* o_off = app.add_flag("--no-orientation", c.no_orientation, "Disable orientation constraints");
  o_on->excludes(o_off);
  app.add_option("--timeout-ms", c.timeout_ms, "Solver wall-clock budget per solve")->check(CLI::PositiveNumber);
  app.add_flag("--degraded-vote", c.degraded_vote, "Let a lone surviving replica carry the vote");
  app.add_flag("--seedless", c.seedless, "Assert that no randomness is used (always true)");
  app.add_option("--seed", c.seed, "Random seed; only 0 is accepted because nothing is random");

  std::string scenario;
  std::string x_old, trace_out, csv_out;
  bool dump_model = false, dump_vars = false, corrupt = false;
  int max_faults = 2;

  auto* solve = app.add_subcommand("solve", "Solve one allocation problem");
  solve->add_option("scenario", scenario, "Scenario JSON")->required();
  solve->add_option("--x-old", x_old, "Previous allocation, {\"hosts\": [...]}");
  solve->add_flag("--dump-model", dump_model, "Print the model before the result");
  solve->add_flag("--dump-vars", dump_vars, "Print every nonzero variable");

  auto* simulate = app.add_subcommand("simulate", "Run the fault scenario and write the JSONL trace");
  simulate->add_option("scenario", scenario, "Scenario JSON")->required();
  simulate->add_option("trace", trace_out, "Output trace file (default: standard output)");
  simulate->add_option("--csv", csv_out, "Also write t,thrust,command as CSV");

  auto* verify = app.add_subcommand("verify", "Check the objective weight inequalities");
  verify->add_option("scenario", scenario, "Scenario JSON")->required();
  verify->add_flag("--corrupt", corrupt, "Weaken the weights to their boundary (debugging)");

  auto* oracle = app.add_subcommand("oracle-check", "Compare the solver with exhaustive search");
  oracle->add_option("scenario", scenario, "Scenario JSON")->required();
  oracle->add_option("--max-faults", max_faults, "Largest crash subset to sweep")->check(CLI::NonNegativeNumber);

  auto* repl = app.add_subcommand("repl", "Interactive fault injection");
  repl->add_option("scenario", scenario, "Scenario JSON")->required();

  auto* dot = app.add_subcommand("dot", "Print the platform graph in Graphviz format");
  dot->add_option("scenario", scenario, "Scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (c.seed != 0) throw CliError{"--seed: nothing in this tool is random; only 0 is accepted"};
    if (solve->parsed()) return cmd_solve(c, scenario, x_old, dump_model, dump_vars);
    if (simulate->parsed()) return cmd_simulate(c, scenario, trace_out, csv_out);
    if (verify->parsed()) return cmd_verify(c, scenario, corrupt);
    if (oracle->parsed()) return cmd_oracle_check(c, scenario, max_faults);
    if (repl->parsed()) return cmd_repl(c, scenario);
    if (dot->parsed()) return cmd_dot(c, scenario);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return kExitError;
  }
  return kExitError;
}
