#include <doctest.h>

#include <json.hpp>
#include <nocrealloc/nocrealloc.h>
#include <string>

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  noc_string_free(s);
  return out;
}

std::string demo_path() { return std::string(NOCR_SCENARIO_DIR) + "/demo.json"; }

const char* kSmall = R"({"platform": {"rows": 2, "cols": 2},
  "applications": [{"name": "A", "priority": 1, "rows": 1, "cols": 2},
                   {"name": "B", "priority": 2, "rows": 1, "cols": 2},
                   {"name": "C", "priority": 3, "rows": 1, "cols": 1, "allocator": true}],
  "faults": [{"t": 1, "cu": 3}]})";

}  // namespace

TEST_CASE("errors are reported through status codes") {
  noc_scenario* s = nullptr;
  CHECK(noc_scenario_load_string("{", &s) == NOC_INVALID_ARGUMENT);
  CHECK(s == nullptr);
  CHECK(std::string(noc_last_error()).find("malformed") != std::string::npos);
  CHECK(noc_scenario_load_file("/nonexistent/x.json", &s) == NOC_INVALID_ARGUMENT);
  CHECK(noc_scenario_load_string(kSmall, nullptr) == NOC_INVALID_ARGUMENT);
  CHECK(noc_solve(nullptr, nullptr, nullptr) == NOC_INVALID_ARGUMENT);
  noc_scenario_free(nullptr);
  noc_result_free(nullptr);
  noc_sim_free(nullptr);
  CHECK(std::string(noc_version()).size() > 0);
}

TEST_CASE("solve through the C interface") {
  noc_scenario* s = nullptr;
  REQUIRE(noc_scenario_load_string(kSmall, &s) == NOC_OK);
  noc_result* r = nullptr;
  REQUIRE(noc_solve(s, nullptr, &r) == NOC_OK);
  noc_solve_status st;
  REQUIRE(noc_result_status(r, &st) == NOC_OK);
  CHECK(st == NOC_SOLVE_OPTIMAL);
  char* text = nullptr;
  REQUIRE(noc_result_hosts_json(r, &text) == NOC_OK);
  auto hosts = nlohmann::json::parse(take(text));
  // CU 3 is crashed: A runs, B cannot fit beside the allocator.
  REQUIRE(hosts["hosts"].size() == 5);
  for (const auto& h : hosts["hosts"]) CHECK(h != 3);
  REQUIRE(noc_result_report(r, &text) == NOC_OK);
  std::string report = take(text);
  CHECK(report.find("status optimal") != std::string::npos);
  CHECK(report.find("dropped") != std::string::npos);
  REQUIRE(noc_result_objective(r, &text) == NOC_OK);
  CHECK(std::stoll(take(text)) > 0);
  REQUIRE(noc_result_model_dump(r, &text) == NOC_OK);
  CHECK(take(text).rfind("maximize", 0) == 0);
  REQUIRE(noc_result_variables(r, &text) == NOC_OK);
  CHECK(take(text).find("r[0] = 1") != std::string::npos);
  noc_result_free(r);

  CHECK(noc_solve(s, R"({"hosts": [0]})", &r) == NOC_INVALID_ARGUMENT);
  REQUIRE(noc_solve(s, R"({"hosts": [0, 1, -1, -1, 2]})", &r) == NOC_OK);
  noc_result_free(r);
  noc_scenario_free(s);
}

TEST_CASE("verify and oracle check") {
  noc_scenario* s = nullptr;
  REQUIRE(noc_scenario_load_string(kSmall, &s) == NOC_OK);
  char* text = nullptr;
  int ok = 0;
  REQUIRE(noc_verify(s, 0, &text, &ok) == NOC_OK);
  CHECK(ok == 1);
  CHECK(nlohmann::json::parse(take(text)).size() == 5);
  REQUIRE(noc_verify(s, 1, &text, &ok) == NOC_OK);
  CHECK(ok == 0);
  take(text);
  REQUIRE(noc_oracle_check(s, 1, &text, &ok) == NOC_OK);
  CHECK(ok == 1);
  CHECK(take(text).find("PASS") != std::string::npos);
  noc_scenario_free(s);

  REQUIRE(noc_scenario_load_file(demo_path().c_str(), &s) == NOC_OK);
  CHECK(noc_oracle_check(s, 1, &text, &ok) == NOC_OVERSIZE);
  noc_scenario_free(s);
}

TEST_CASE("simulation through the C interface") {
  noc_scenario* s = nullptr;
  REQUIRE(noc_scenario_load_file(demo_path().c_str(), &s) == NOC_OK);
  noc_sim* sim = nullptr;
  REQUIRE(noc_sim_create(s, &sim) == NOC_OK);
  REQUIRE(noc_sim_settle(sim) == NOC_OK);
  CHECK(noc_sim_tick(sim) >= 1);
  CHECK(noc_sim_fault(sim, 0, "lightning", 1) == NOC_INVALID_ARGUMENT);
  REQUIRE(noc_sim_fault(sim, 0, "crash", 1) == NOC_OK);
  REQUIRE(noc_sim_settle(sim) == NOC_OK);
  char* text = nullptr;
  REQUIRE(noc_sim_grid(sim, &text) == NOC_OK);
  CHECK(take(text)[0] == '#');
  REQUIRE(noc_sim_step(sim, 3) == NOC_OK);
  CHECK(noc_sim_step(sim, -1) == NOC_INVALID_ARGUMENT);
  REQUIRE(noc_sim_summary(sim, &text) == NOC_OK);
  auto sum = nlohmann::json::parse(take(text));
  CHECK(sum["applies"] == 2);
  noc_sim_free(sim);

  REQUIRE(noc_sim_create(s, &sim) == NOC_OK);
  REQUIRE(noc_sim_run(sim) == NOC_OK);
  REQUIRE(noc_sim_trace(sim, &text) == NOC_OK);
  std::string trace = take(text);
  CHECK(trace.rfind("{\"kind\":\"solve\"", 0) == 0);
  REQUIRE(noc_sim_csv(sim, &text) == NOC_OK);
  CHECK(take(text).rfind("t,thrust,command\n", 0) == 0);
  noc_sim_free(sim);
  noc_scenario_free(s);
}
