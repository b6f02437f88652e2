#ifndef MEDCHAIN_MEDCHAIN_H
#define MEDCHAIN_MEDCHAIN_H

/* C interface to the medchain engine.
 *
 * Every call returns a medchain_status. On failure the thread-local message is
 * available from medchain_last_error() until the next call on that thread.
 * Strings returned through char** out-parameters are heap allocated and must be
 * released with medchain_string_free. Request and response bodies are JSON; see
 * docs/schema.md. */

#include <stdint.h>

#if defined(_WIN32)
#define MEDCHAIN_API __declspec(dllexport)
#else
#define MEDCHAIN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum medchain_status {
  MEDCHAIN_OK = 0,
  MEDCHAIN_E_PARSE = 1,
  MEDCHAIN_E_VALIDATION = 2,
  MEDCHAIN_E_ILLEGAL_ACTION = 3,
  MEDCHAIN_E_TERMINAL_STATE = 4,
  MEDCHAIN_E_NO_FEASIBLE_CHAIN = 5,
  MEDCHAIN_E_UNDEFINED_BEARING = 6,
  MEDCHAIN_E_NO_SESSION = 7,
  MEDCHAIN_E_UNKNOWN_REQUEST = 8,
  MEDCHAIN_E_INFEASIBLE = 9,
  MEDCHAIN_E_STALE_FIX = 10,
  MEDCHAIN_E_UNKNOWN_ENTITY = 11,
  MEDCHAIN_E_IO = 12,
  MEDCHAIN_E_INVALID_ARGUMENT = 13,
  MEDCHAIN_E_INTERNAL = 14
} medchain_status;

typedef struct medchain_scenario medchain_scenario;
typedef struct medchain_session medchain_session;

MEDCHAIN_API const char* medchain_version(void);
MEDCHAIN_API const char* medchain_last_error(void);
/* Error type name as used in HTTP error bodies, e.g. "ValidationError". */
MEDCHAIN_API const char* medchain_status_name(medchain_status status);
MEDCHAIN_API void medchain_string_free(char* s);

/* Scenarios. `path_or_id` is a file path or a bundled id such as "mpw2023". */
MEDCHAIN_API medchain_status medchain_scenario_load(const char* path_or_id, medchain_scenario** out);
MEDCHAIN_API medchain_status medchain_scenario_parse(const char* json, medchain_scenario** out);
MEDCHAIN_API medchain_status medchain_scenario_to_json(const medchain_scenario* sc, char** out_json);
MEDCHAIN_API medchain_status medchain_scenario_remove_watercraft(medchain_scenario* sc, const char* watercraft_id);
MEDCHAIN_API void medchain_scenario_free(medchain_scenario* sc);

/* Runs one episode. policy is "mcts" or "greedy"; planner_json (nullable) holds
 * planner settings. out_log receives JSON Lines, out_metrics a JSON object. Either
 * output may be NULL. */
MEDCHAIN_API medchain_status medchain_simulate(const medchain_scenario* sc, const char* policy, uint64_t seed,
                                               const char* planner_json, char** out_log, char** out_metrics);

/* Advances the scenario to t_s without decisions, then plans. */
MEDCHAIN_API medchain_status medchain_plan_at(const medchain_scenario* sc, double t_s, const char* planner_json,
                                              char** out_json);

/* Opportunity zone between two aircraft (home bases, radius of action) with
 * windows and blackouts sampled over [t0_s, t1_s] every dt_s. GeoJSON out. */
MEDCHAIN_API medchain_status medchain_zones(const medchain_scenario* sc, const char* aircraft_a,
                                            const char* aircraft_b, double t0_s, double t1_s, double dt_s,
                                            char** out_geojson);

/* Evacuation chain with the scenario's fleet and aircraft. options_json
 * (nullable): {"t0_s", "horizon_s", "dt_s"}. out_json holds {"plan", "geojson"}. */
MEDCHAIN_API medchain_status medchain_chain(const medchain_scenario* sc, double from_lat, double from_lon,
                                            double to_lat, double to_lon, const char* options_json,
                                            char** out_json);

/* Dedicated AXP placement over a grid x grid lattice spanning the scenario's
 * demand (request locations and destinations). */
MEDCHAIN_API medchain_status medchain_place_axp(const medchain_scenario* sc, int grid, const char* options_json,
                                                char** out_json);

MEDCHAIN_API medchain_status medchain_bench(const medchain_scenario* sc, const char* policy, int episodes,
                                            uint64_t seed, const char* planner_json, char** out_json);

/* *out_ok is 1 when the log is consistent; otherwise 0 and *out_violation
 * (nullable) names the first violated invariant. */
MEDCHAIN_API medchain_status medchain_replay_check(const medchain_scenario* sc, const char* log_jsonl, int* out_ok,
                                                   char** out_violation);

/* Operations sessions. Bodies and responses match the HTTP endpoints. */
MEDCHAIN_API medchain_status medchain_session_create(const medchain_scenario* sc, medchain_session** out);
MEDCHAIN_API void medchain_session_free(medchain_session* s);
MEDCHAIN_API medchain_status medchain_session_state(medchain_session* s, char** out_json);
MEDCHAIN_API medchain_status medchain_session_submit_request(medchain_session* s, const char* body, char** out_json);
MEDCHAIN_API medchain_status medchain_session_recommend(medchain_session* s, const char* body, char** out_json);
MEDCHAIN_API medchain_status medchain_session_whatif(medchain_session* s, const char* body, char** out_json);
MEDCHAIN_API medchain_status medchain_session_commit(medchain_session* s, const char* body, char** out_json);
MEDCHAIN_API medchain_status medchain_session_ingest_position(medchain_session* s, const char* body, char** out_json);
MEDCHAIN_API medchain_status medchain_session_tick(medchain_session* s, const char* body, char** out_json);

/* Same as medchain_zones but over the session's current fleet, so ingested
 * position fixes are honored. */
MEDCHAIN_API medchain_status medchain_session_zones(medchain_session* s, const char* aircraft_a,
                                                    const char* aircraft_b, double t0_s, double t1_s, double dt_s,
                                                    char** out_geojson);

/* Called once per applied mutation, in revision order, on the mutating thread.
 * The callback must not call back into the same session. */
typedef void (*medchain_event_cb)(uint64_t revision, const char* payload_json, void* user);
MEDCHAIN_API medchain_status medchain_session_subscribe(medchain_session* s, medchain_event_cb cb, void* user,
                                                        int* out_token);
MEDCHAIN_API medchain_status medchain_session_unsubscribe(medchain_session* s, int token);

#ifdef __cplusplus
}
#endif

#endif /* MEDCHAIN_MEDCHAIN_H */
