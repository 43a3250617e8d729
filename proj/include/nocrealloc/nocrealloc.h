#ifndef NOCREALLOC_H
#define NOCREALLOC_H

/* C interface of the fault-tolerant allocation library.
 *
 * All objects are opaque handles created and destroyed by the library.
 * Functions return a noc_status; on failure noc_last_error() describes the
 * problem (thread-local, valid until the next call on the same thread).
 * Strings returned through char** are heap-allocated and must be released
 * with noc_string_free. */

#include <stddef.h>

#if defined(_WIN32)
#  define NOC_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define NOC_API __attribute__((visibility("default")))
#else
#  define NOC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum noc_status {
  NOC_OK = 0,
  NOC_INVALID_ARGUMENT = 1,
  NOC_OVERSIZE = 2,
  NOC_OVERFLOW = 3,
  NOC_INTERNAL = 4
} noc_status;

typedef enum noc_solve_status {
  NOC_SOLVE_OPTIMAL = 0,
  NOC_SOLVE_INFEASIBLE = 1,
  NOC_SOLVE_TIMEOUT = 2
} noc_solve_status;

typedef enum noc_log_level { NOC_LOG_QUIET = 0, NOC_LOG_INFO = 1, NOC_LOG_DEBUG = 2 } noc_log_level;

typedef struct noc_scenario noc_scenario;
typedef struct noc_result noc_result;
typedef struct noc_sim noc_sim;

NOC_API const char* noc_version(void);
NOC_API const char* noc_last_error(void);
NOC_API void noc_string_free(char* s);
NOC_API noc_status noc_set_log_level(noc_log_level level);

/* Scenarios */
NOC_API noc_status noc_scenario_load_file(const char* path, noc_scenario** out);
NOC_API noc_status noc_scenario_load_string(const char* json, noc_scenario** out);
NOC_API void noc_scenario_free(noc_scenario* s);
NOC_API noc_status noc_scenario_set_orientation(noc_scenario* s, int enabled);
NOC_API noc_status noc_scenario_set_timeout_ms(noc_scenario* s, long long timeout_ms);
NOC_API noc_status noc_scenario_set_degraded_vote(noc_scenario* s, int enabled);
/* Graphviz rendering of the platform after replaying the crash events. */
NOC_API noc_status noc_scenario_platform_dot(const noc_scenario* s, char** out);

/* One-shot solve. x_old_json is NULL for an initial allocation, otherwise
 * {"hosts": [...]} with one CU index or -1 per application node. The fault
 * state is the one left after replaying every scheduled crash event;
 * computational faults are invisible to a single solve. */
NOC_API noc_status noc_solve(const noc_scenario* s, const char* x_old_json, noc_result** out);
NOC_API noc_status noc_result_status(const noc_result* r, noc_solve_status* out);
/* Objective as an exact decimal integer. */
NOC_API noc_status noc_result_objective(const noc_result* r, char** out);
/* Human-readable summary: status, objective, running applications, hosts. */
NOC_API noc_status noc_result_report(const noc_result* r, char** out);
NOC_API noc_status noc_result_hosts_json(const noc_result* r, char** out);
/* "name = value" for every nonzero variable. */
NOC_API noc_status noc_result_variables(const noc_result* r, char** out);
NOC_API noc_status noc_result_model_dump(const noc_result* r, char** out);
NOC_API void noc_result_free(noc_result* r);

/* Coefficient and node-count checks as a JSON array. corrupt != 0 weakens
 * the lowest-priority weight and the move weight to their boundary values,
 * which must make the checks fail. */
NOC_API noc_status noc_verify(const noc_scenario* s, int corrupt, char** json_out, int* all_hold);

/* Solver-versus-oracle sweep over all crash subsets of size <= max_faults.
 * Returns NOC_OVERSIZE when the scenario is too large for the oracle. */
NOC_API noc_status noc_oracle_check(const noc_scenario* s, int max_faults, char** report, int* passed);

/* Simulation */
NOC_API noc_status noc_sim_create(const noc_scenario* s, noc_sim** out);
NOC_API noc_status noc_sim_run(noc_sim* sim);
/* kind is "crash" or "computational"; inject != 0 injects, 0 recovers. */
NOC_API noc_status noc_sim_fault(noc_sim* sim, int cu, const char* kind, int inject);
NOC_API noc_status noc_sim_step(noc_sim* sim, int ticks);
/* Steps until the pending reallocation, if any, has been applied. */
NOC_API noc_status noc_sim_settle(noc_sim* sim);
NOC_API long long noc_sim_tick(const noc_sim* sim);
NOC_API noc_status noc_sim_grid(const noc_sim* sim, char** out);
NOC_API noc_status noc_sim_trace(const noc_sim* sim, char** out);
NOC_API noc_status noc_sim_csv(const noc_sim* sim, char** out);
NOC_API noc_status noc_sim_summary(const noc_sim* sim, char** out);
NOC_API void noc_sim_free(noc_sim* sim);

#ifdef __cplusplus
}
#endif

#endif /* NOCREALLOC_H */
