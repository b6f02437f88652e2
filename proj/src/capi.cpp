#include "medchain/medchain.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "json_io.hpp"
#include "medchain/errors.hpp"
#include "medchain/opsvc.hpp"
#include "medchain/planner.hpp"
#include "medchain/scenario.hpp"
#include "medchain/simkit.hpp"
#include "medchain/zones.hpp"

struct medchain_scenario {
  medchain::Scenario sc;
};

struct medchain_session {
  std::unique_ptr<medchain::Session> session;
};

namespace {

using medchain::json_io::Json;
using nlohmann::json;

thread_local std::string g_last_error;

medchain_status status_of(medchain::ErrorCode code) {
  using medchain::ErrorCode;
  switch (code) {
    case ErrorCode::parse: return MEDCHAIN_E_PARSE;
    case ErrorCode::validation: return MEDCHAIN_E_VALIDATION;
    case ErrorCode::illegal_action: return MEDCHAIN_E_ILLEGAL_ACTION;
    case ErrorCode::terminal_state: return MEDCHAIN_E_TERMINAL_STATE;
    case ErrorCode::no_feasible_chain: return MEDCHAIN_E_NO_FEASIBLE_CHAIN;
    case ErrorCode::undefined_bearing: return MEDCHAIN_E_UNDEFINED_BEARING;
    case ErrorCode::no_session: return MEDCHAIN_E_NO_SESSION;
    case ErrorCode::unknown_request: return MEDCHAIN_E_UNKNOWN_REQUEST;
    case ErrorCode::infeasible: return MEDCHAIN_E_INFEASIBLE;
    case ErrorCode::stale_fix: return MEDCHAIN_E_STALE_FIX;
    case ErrorCode::unknown_entity: return MEDCHAIN_E_UNKNOWN_ENTITY;
    case ErrorCode::io: return MEDCHAIN_E_IO;
  }
  return MEDCHAIN_E_INTERNAL;
}

template <class Fn>
medchain_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return MEDCHAIN_OK;
  } catch (const medchain::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const json::parse_error& e) {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return MEDCHAIN_E_PARSE;
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return MEDCHAIN_E_VALIDATION;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return MEDCHAIN_E_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MEDCHAIN_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return MEDCHAIN_E_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

void need(const void* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string(what) + " must not be NULL");
}

json parse_body(const char* body) {
  if (!body || !*body) return json::object();
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw medchain::ParseError(std::string("malformed JSON body: ") + e.what());
  }
  if (!j.is_object()) throw medchain::ValidationError("", "request body must be a JSON object");
  return j;
}

medchain::PlannerConfig planner_from(const char* planner_json) {
  if (!planner_json || !*planner_json) return {};
  return medchain::json_io::planner_config_from(parse_body(planner_json));
}

medchain::Policy policy_from(const char* policy, const medchain::PlannerConfig& cfg) {
  const std::string name = policy ? policy : "mcts";
  if (name == "mcts") return medchain::mcts_policy_fn(cfg);
  if (name == "greedy") return medchain::greedy_policy_fn();
  throw medchain::ValidationError("policy", "expected mcts or greedy, got '" + name + "'");
}

const medchain::Aircraft& aircraft_named(const std::vector<medchain::Aircraft>& pool, const char* id) {
  need(id, "aircraft id");
  for (const auto& a : pool) {
    if (a.id == id) return a;
  }
  throw medchain::UnknownEntity(std::string("unknown aircraft '") + id + "'");
}

std::string zones_doc(const std::vector<medchain::Aircraft>& pool, const std::vector<medchain::Watercraft>& fleet,
                      const char* id_a, const char* id_b, double t0_s, double t1_s, double dt_s) {
  const auto& a = aircraft_named(pool, id_a);
  const auto& b = aircraft_named(pool, id_b);
  const auto zone = medchain::opportunity_zone(a.home_base, medchain::radius_of_action(a.max_range), b.home_base,
                                               medchain::radius_of_action(b.max_range));
  const auto windows = medchain::zone_windows(zone, fleet, t0_s, t1_s, dt_s);
  return medchain::zone_geojson(zone, windows, medchain::blackouts(windows, t0_s, t1_s));
}

double num_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw medchain::ValidationError(key, "expected a number");
  return j.at(key).get<double>();
}

medchain::ChainConfig chain_config_from(const json& j, const medchain::ServiceConfig& svc) {
  medchain::ChainConfig c;
  c.refuel_s = svc.refuel_s;
  c.t0_s = num_or(j, "t0_s", c.t0_s);
  c.horizon_s = num_or(j, "horizon_s", c.horizon_s);
  c.dt_s = num_or(j, "dt_s", c.dt_s);
  return c;
}

medchain::Session& live(medchain_session* s) {
  if (!s || !s->session) throw medchain::NoSession("no active session");
  return *s->session;
}

std::optional<std::string> opt_id(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) throw medchain::ValidationError(key, "expected a string or null");
  return j.at(key).get<std::string>();
}

std::string required_id(const json& j, const char* key) {
  auto v = opt_id(j, key);
  if (!v || v->empty()) throw medchain::ValidationError(key, "required field missing");
  return *v;
}

Json ack(std::uint64_t revision) { return Json{{"revision", revision}}; }

}  // namespace

extern "C" {

const char* medchain_version(void) { return "1.0.0"; }

const char* medchain_last_error(void) { return g_last_error.c_str(); }

const char* medchain_status_name(medchain_status status) {
  switch (status) {
    case MEDCHAIN_OK: return "OK";
    case MEDCHAIN_E_PARSE: return "ParseError";
    case MEDCHAIN_E_VALIDATION: return "ValidationError";
    case MEDCHAIN_E_ILLEGAL_ACTION: return "IllegalAction";
    case MEDCHAIN_E_TERMINAL_STATE: return "TerminalState";
    case MEDCHAIN_E_NO_FEASIBLE_CHAIN: return "NoFeasibleChain";
    case MEDCHAIN_E_UNDEFINED_BEARING: return "UndefinedBearing";
    case MEDCHAIN_E_NO_SESSION: return "NoSession";
    case MEDCHAIN_E_UNKNOWN_REQUEST: return "UnknownRequest";
    case MEDCHAIN_E_INFEASIBLE: return "Infeasible";
    case MEDCHAIN_E_STALE_FIX: return "StaleFix";
    case MEDCHAIN_E_UNKNOWN_ENTITY: return "UnknownEntity";
    case MEDCHAIN_E_IO: return "IoError";
    case MEDCHAIN_E_INVALID_ARGUMENT: return "InvalidArgument";
    case MEDCHAIN_E_INTERNAL: return "InternalError";
  }
  return "InternalError";
}

void medchain_string_free(char* s) { std::free(s); }

medchain_status medchain_scenario_load(const char* path_or_id, medchain_scenario** out) {
  return guarded([&] {
    need(path_or_id, "path_or_id");
    need(out, "out");
    *out = new medchain_scenario{medchain::load_scenario(path_or_id)};
  });
}

medchain_status medchain_scenario_parse(const char* text, medchain_scenario** out) {
  return guarded([&] {
    need(text, "json");
    need(out, "out");
    *out = new medchain_scenario{medchain::parse_scenario(text)};
  });
}

medchain_status medchain_scenario_to_json(const medchain_scenario* sc, char** out_json) {
  return guarded([&] {
    need(sc, "scenario");
    need(out_json, "out_json");
    *out_json = dup(medchain::serialize_scenario(sc->sc));
  });
}

medchain_status medchain_scenario_remove_watercraft(medchain_scenario* sc, const char* id) {
  return guarded([&] {
    need(sc, "scenario");
    need(id, "watercraft id");
    auto& fleet = sc->sc.watercraft;
    auto it = std::find_if(fleet.begin(), fleet.end(), [&](const medchain::Watercraft& w) { return w.id == id; });
    if (it == fleet.end()) throw medchain::UnknownEntity(std::string("unknown watercraft '") + id + "'");
    fleet.erase(it);
  });
}

void medchain_scenario_free(medchain_scenario* sc) { delete sc; }

medchain_status medchain_simulate(const medchain_scenario* sc, const char* policy, uint64_t seed,
                                  const char* planner_json, char** out_log, char** out_metrics) {
  return guarded([&] {
    need(sc, "scenario");
    const auto cfg = planner_from(planner_json);
    const auto result = medchain::run(sc->sc, policy_from(policy, cfg), seed);
    put(out_log, medchain::to_jsonl(result.log));
    if (out_metrics) {
      Json m = medchain::json_io::metrics(result.metrics);
      m["total_return"] = result.total_return;
      m["stalled"] = result.final_state.stalled;
      *out_metrics = dup(m.dump());
    }
  });
}

medchain_status medchain_plan_at(const medchain_scenario* sc, double t_s, const char* planner_json, char** out_json) {
  return guarded([&] {
    need(sc, "scenario");
    need(out_json, "out_json");
    if (!std::isfinite(t_s) || t_s < 0.0) throw medchain::ValidationError("at", "must be >= 0");
    const auto cfg = planner_from(planner_json);
    const auto state = medchain::advance_to(medchain::initial_state(sc->sc), medchain::ceil_ms(t_s)).next_state;
    Json out = medchain::json_io::recommendation(medchain::plan(state, cfg));
    out["clock_ms"] = state.clock;
    *out_json = dup(out.dump());
  });
}

medchain_status medchain_zones(const medchain_scenario* sc, const char* aircraft_a, const char* aircraft_b,
                               double t0_s, double t1_s, double dt_s, char** out_geojson) {
  return guarded([&] {
    need(sc, "scenario");
    need(out_geojson, "out_geojson");
    *out_geojson = dup(zones_doc(sc->sc.aircraft, sc->sc.watercraft, aircraft_a, aircraft_b, t0_s, t1_s, dt_s));
  });
}

medchain_status medchain_chain(const medchain_scenario* sc, double from_lat, double from_lon, double to_lat,
                               double to_lon, const char* options_json, char** out_json) {
  return guarded([&] {
    need(sc, "scenario");
    need(out_json, "out_json");
    const auto opts = chain_config_from(parse_body(options_json), sc->sc.service);
    const medchain::GeoPoint from(from_lat, from_lon);
    const medchain::GeoPoint to(to_lat, to_lon);
    const auto plan = medchain::chain_search(from, to, sc->sc.watercraft, sc->sc.aircraft, opts);
    Json out{{"plan", medchain::json_io::plan(plan)}, {"geojson", Json::parse(medchain::plan_geojson(plan))}};
    *out_json = dup(out.dump());
  });
}

medchain_status medchain_place_axp(const medchain_scenario* sc, int grid, const char* options_json, char** out_json) {
  return guarded([&] {
    need(sc, "scenario");
    need(out_json, "out_json");
    if (grid < 1) throw medchain::ValidationError("grid", "must be >= 1");
    const json opts = parse_body(options_json);
    std::vector<medchain::DemandPair> demand;
    double lat_lo = 90, lat_hi = -90, lon_lo = 180, lon_hi = -180;
    auto extend = [&](const medchain::GeoPoint& p) {
      lat_lo = std::min(lat_lo, p.lat());
      lat_hi = std::max(lat_hi, p.lat());
      lon_lo = std::min(lon_lo, p.lon());
      lon_hi = std::max(lon_hi, p.lon());
    };
    for (const auto& r : sc->sc.requests) {
      const medchain::TreatmentFacility* dest = nullptr;
      for (const auto& f : sc->sc.facilities) {
        if (f.id == r.destination) dest = &f;
      }
      demand.push_back({r.location, dest->location});
      extend(r.location);
      extend(dest->location);
    }
    if (demand.empty()) throw medchain::ValidationError("requests", "placement needs at least one request as demand");
    std::vector<medchain::GeoPoint> candidates;
    for (int i = 0; i < grid; ++i) {
      for (int k = 0; k < grid; ++k) {
        const double fi = grid == 1 ? 0.5 : static_cast<double>(i) / (grid - 1);
        const double fk = grid == 1 ? 0.5 : static_cast<double>(k) / (grid - 1);
        candidates.emplace_back(lat_lo + fi * (lat_hi - lat_lo), lon_lo + fk * (lon_hi - lon_lo));
      }
    }
    medchain::PlacementConfig cfg;
    cfg.t0_s = num_or(opts, "t0_s", cfg.t0_s);
    cfg.horizon_s = num_or(opts, "horizon_s", cfg.horizon_s);
    cfg.dt_s = num_or(opts, "dt_s", cfg.dt_s);
    cfg.chain = chain_config_from(opts.value("chain", json::object()), sc->sc.service);
    const auto placed = medchain::place_dedicated_axp(candidates, demand, sc->sc.watercraft, sc->sc.aircraft, cfg);
    Json cands = Json::array();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      cands.push_back({{"location", medchain::json_io::point(candidates[i])}, {"coverage", placed.scores[i]}});
    }
    Json out{{"index", placed.index},
             {"location", medchain::json_io::point(placed.location)},
             {"coverage", placed.coverage},
             {"candidates", cands}};
    *out_json = dup(out.dump());
  });
}

medchain_status medchain_bench(const medchain_scenario* sc, const char* policy, int episodes, uint64_t seed,
                               const char* planner_json, char** out_json) {
  return guarded([&] {
    need(sc, "scenario");
    need(out_json, "out_json");
    const auto cfg = planner_from(planner_json);
    const auto summary = medchain::evaluate_policy(sc->sc, policy_from(policy, cfg), episodes, seed);
    Json out = medchain::json_io::summary(summary);
    out["policy"] = policy ? policy : "mcts";
    *out_json = dup(out.dump());
  });
}

medchain_status medchain_replay_check(const medchain_scenario* sc, const char* log_jsonl, int* out_ok,
                                      char** out_violation) {
  return guarded([&] {
    need(sc, "scenario");
    need(log_jsonl, "log_jsonl");
    need(out_ok, "out_ok");
    const auto report = medchain::replay_check(medchain::parse_jsonl(log_jsonl), sc->sc);
    *out_ok = report.ok ? 1 : 0;
    put(out_violation, report.violation);
  });
}

medchain_status medchain_session_create(const medchain_scenario* sc, medchain_session** out) {
  return guarded([&] {
    need(sc, "scenario");
    need(out, "out");
    *out = new medchain_session{std::make_unique<medchain::Session>(sc->sc)};
  });
}

void medchain_session_free(medchain_session* s) { delete s; }

medchain_status medchain_session_state(medchain_session* s, char** out_json) {
  return guarded([&] {
    need(out_json, "out_json");
    const auto snap = live(s).snapshot();
    *out_json = dup(medchain::json_io::state(snap->state, snap->revision).dump());
  });
}

medchain_status medchain_session_submit_request(medchain_session* s, const char* body, char** out_json) {
  return guarded([&] {
    auto& session = live(s);
    const json j = parse_body(body);
    const double now = medchain::to_seconds(session.snapshot()->state.clock);
    auto req = medchain::json_io::request_from(j, now);
    const std::string id = req.id;
    Json out = ack(session.submit_request(std::move(req)));
    out["request_id"] = id;
    put(out_json, out.dump());
  });
}

medchain_status medchain_session_recommend(medchain_session* s, const char* body, char** out_json) {
  return guarded([&] {
    auto& session = live(s);
    const json j = parse_body(body);
    const auto cfg = medchain::json_io::planner_config_from(j.value("config", json()));
    const auto revision = session.snapshot()->revision;
    Json out = medchain::json_io::recommendation(session.recommend(required_id(j, "request_id"), cfg));
    out["revision"] = revision;
    put(out_json, out.dump());
  });
}

medchain_status medchain_session_whatif(medchain_session* s, const char* body, char** out_json) {
  return guarded([&] {
    auto& session = live(s);
    const json j = parse_body(body);
    const auto cfg = medchain::json_io::planner_config_from(j.value("config", json()));
    const auto revision = session.snapshot()->revision;
    Json out = medchain::json_io::whatif(
        session.whatif(required_id(j, "request_id"), opt_id(j, "forced_axp"), opt_id(j, "forced_aircraft"), cfg));
    out["revision"] = revision;
    put(out_json, out.dump());
  });
}

medchain_status medchain_session_commit(medchain_session* s, const char* body, char** out_json) {
  return guarded([&] {
    auto& session = live(s);
    const json j = parse_body(body);
    const auto action = medchain::json_io::action_from(j.contains("action") ? j.at("action") : j);
    put(out_json, ack(session.commit(action)).dump());
  });
}

medchain_status medchain_session_ingest_position(medchain_session* s, const char* body, char** out_json) {
  return guarded([&] {
    auto& session = live(s);
    const json j = parse_body(body);
    const std::string id = required_id(j, "entity_id");
    if (!j.contains("t_s") || !j.at("t_s").is_number()) throw medchain::ValidationError("t_s", "expected a number");
    if (!j.contains("position")) throw medchain::ValidationError("position", "required field missing");
    const auto p = medchain::json_io::point_from(j.at("position"), "position");
    put(out_json, ack(session.ingest_position(id, j.at("t_s").get<double>(), p)).dump());
  });
}

medchain_status medchain_session_tick(medchain_session* s, const char* body, char** out_json) {
  return guarded([&] {
    auto& session = live(s);
    const json j = parse_body(body);
    const double now = medchain::to_seconds(session.snapshot()->state.clock);
    double target;
    if (j.contains("to_s")) {
      target = num_or(j, "to_s", now);
    } else if (j.contains("dt_s")) {
      target = now + num_or(j, "dt_s", 0.0);
    } else {
      throw medchain::ValidationError("to_s", "either to_s or dt_s is required");
    }
    const auto revision = session.tick(target);
    Json out = ack(revision);
    out["clock_ms"] = session.snapshot()->state.clock;
    put(out_json, out.dump());
  });
}

medchain_status medchain_session_zones(medchain_session* s, const char* aircraft_a, const char* aircraft_b,
                                       double t0_s, double t1_s, double dt_s, char** out_geojson) {
  return guarded([&] {
    const auto snap = live(s).snapshot();
    need(out_geojson, "out_geojson");
    *out_geojson =
        dup(zones_doc(snap->state.aircraft, snap->state.watercraft, aircraft_a, aircraft_b, t0_s, t1_s, dt_s));
  });
}

medchain_status medchain_session_subscribe(medchain_session* s, medchain_event_cb cb, void* user, int* out_token) {
  return guarded([&] {
    auto& session = live(s);
    need(reinterpret_cast<const void*>(cb), "callback");
    need(out_token, "out_token");
    *out_token = session.subscribe(
        [cb, user](const medchain::Broadcast& b) { cb(b.revision, b.payload.c_str(), user); });
  });
}

medchain_status medchain_session_unsubscribe(medchain_session* s, int token) {
  return guarded([&] { live(s).unsubscribe(token); });
}

}  // extern "C"
