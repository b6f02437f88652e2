#include "medchain/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "medchain/errors.hpp"
#include "medchain/smdp.hpp"

#ifndef MEDCHAIN_BUNDLED_SCENARIO_DIR
#define MEDCHAIN_BUNDLED_SCENARIO_DIR "scenarios"
#endif

namespace medchain {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

double distance_factor(const std::string& unit, const std::string& path) {
  if (unit == "m") return 1.0;
  if (unit == "mi_statute") return kStatuteMileM;
  if (unit == "nmi") return kNauticalMileM;
  throw ValidationError(path, "unknown distance unit '" + unit + "' (mi_statute, nmi, m)");
}

double speed_factor(const std::string& unit, const std::string& path) {
  if (unit == "mps") return 1.0;
  if (unit == "kn") return kKnotMps;
  throw ValidationError(path, "unknown speed unit '" + unit + "' (kn, mps)");
}

const json& need(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path + "." + key, "required field missing");
  return *it;
}

double num(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path, "expected a number");
  return v.get<double>();
}

double num(const json& obj, const char* key, const std::string& path) {
  return num(need(obj, key, path), path + "." + key);
}

double num_or(const json& obj, const char* key, double fallback, const std::string& path) {
  return obj.contains(key) ? num(obj, key, path) : fallback;
}

std::string str(const json& obj, const char* key, const std::string& path) {
  const json& v = need(obj, key, path);
  if (!v.is_string()) throw ValidationError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

bool boolean(const json& obj, const char* key, const std::string& path) {
  const json& v = need(obj, key, path);
  if (!v.is_boolean()) throw ValidationError(path + "." + key, "expected true or false");
  return v.get<bool>();
}

bool boolean_or(const json& obj, const char* key, bool fallback, const std::string& path) {
  return obj.contains(key) ? boolean(obj, key, path) : fallback;
}

int integer(const json& obj, const char* key, const std::string& path) {
  const json& v = need(obj, key, path);
  if (!v.is_number_integer()) throw ValidationError(path + "." + key, "expected an integer");
  return v.get<int>();
}

GeoPoint point(const json& v, const std::string& path) {
  const double lat = num(v, "lat", path);
  const double lon = num(v, "lon", path);
  try {
    return GeoPoint(lat, lon);
  } catch (const std::exception& e) {
    throw ValidationError(path, e.what());
  }
}

LengthM length(double meters, const std::string& path) {
  if (!std::isfinite(meters) || meters < 0.0) throw ValidationError(path, "must be a non-negative length");
  return LengthM(meters);
}

const json& array_at(const json& obj, const char* key, const std::string& path) {
  static const json empty = json::array();
  if (!obj.contains(key)) return empty;
  const json& v = obj.at(key);
  if (!v.is_array()) throw ValidationError(path + "." + key, "expected an array");
  return v;
}

std::string idx(const char* key, std::size_t i) { return std::string(key) + "[" + std::to_string(i) + "]"; }

ordered_json point_json(const GeoPoint& p) { return {{"lat", p.lat()}, {"lon", p.lon()}}; }

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scenario JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario must be a JSON object");

  Scenario sc;
  sc.schema_version = integer(doc, "schema_version", "");
  if (sc.schema_version != kSchemaVersion) {
    throw ValidationError("schema_version", "unsupported version " + std::to_string(sc.schema_version));
  }
  if (doc.contains("id")) sc.id = str(doc, "id", "");
  const json& units = need(doc, "units", "");
  sc.distance_unit = str(units, "distance", "units");
  sc.speed_unit = str(units, "speed", "units");
  const double dist = distance_factor(sc.distance_unit, "units.distance");
  const double speed = speed_factor(sc.speed_unit, "units.speed");

  if (doc.contains("service")) {
    const json& sv = doc.at("service");
    const std::string p = "service";
    ServiceConfig& c = sc.service;
    c.refuel_s = num_or(sv, "refuel_s", c.refuel_s, p);
    c.stochastic = boolean_or(sv, "stochastic", c.stochastic, p);
    c.noise_spread = num_or(sv, "noise_spread", c.noise_spread, p);
    c.launch_grid_s = num_or(sv, "launch_grid_s", c.launch_grid_s, p);
    c.max_intercept_s = num_or(sv, "max_intercept_s", c.max_intercept_s, p);
    c.stall_penalty_s = num_or(sv, "stall_penalty_s", c.stall_penalty_s, p);
    if (sv.contains("precedence_weights")) {
      const json& w = sv.at("precedence_weights");
      const std::string wp = p + ".precedence_weights";
      c.precedence_weights = {num(w, "urgent", wp), num(w, "priority", wp), num(w, "routine", wp)};
    }
  }

  const json& aircraft = array_at(doc, "aircraft", "");
  for (std::size_t i = 0; i < aircraft.size(); ++i) {
    const json& a = aircraft[i];
    const std::string p = idx("aircraft", i);
    Aircraft ac;
    ac.id = str(a, "id", p);
    ac.home_base = point(need(a, "home_base", p), p + ".home_base");
    ac.cruise_speed_mps = num(a, "cruise_speed", p) * speed;
    ac.max_range = length(num(a, "max_range", p) * dist, p + ".max_range");
    ac.fuel_range_remaining =
        a.contains("fuel_range_remaining")
            ? length(num(a, "fuel_range_remaining", p) * dist, p + ".fuel_range_remaining")
            : ac.max_range;
    ac.service_time_hoist_s = num_or(a, "service_time_hoist_s", ac.service_time_hoist_s, p);
    ac.service_time_land_s = num_or(a, "service_time_land_s", ac.service_time_land_s, p);
    if (a.contains("cabin_size")) ac.cabin_size = integer(a, "cabin_size", p);
    ac.can_deliver = boolean_or(a, "can_deliver", true, p);
    ac.can_pickup = boolean_or(a, "can_pickup", true, p);
    ac.position = ac.home_base;
    sc.aircraft.push_back(std::move(ac));
  }

  const json& fleet = array_at(doc, "watercraft", "");
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    const json& w = fleet[i];
    const std::string p = idx("watercraft", i);
    Watercraft wc;
    wc.id = str(w, "id", p);
    wc.helipad = boolean(w, "helipad", p);
    wc.refuel = boolean_or(w, "refuel", false, p);
    if (w.contains("med_level")) {
      auto lvl = med_level_from_string(str(w, "med_level", p));
      if (!lvl) throw ValidationError(p + ".med_level", "expected none, medic or role2");
      wc.med_level = *lvl;
    }
    const json& route = need(w, "route", p);
    const std::string rp = p + ".route";
    const json& wps = need(route, "waypoints", rp);
    if (!wps.is_array()) throw ValidationError(rp + ".waypoints", "expected an array");
    for (std::size_t k = 0; k < wps.size(); ++k) {
      wc.route.waypoints.push_back(point(wps[k], rp + idx(".waypoints", k)));
    }
    const json& speeds = array_at(route, "leg_speeds", rp);
    for (std::size_t k = 0; k < speeds.size(); ++k) {
      wc.route.leg_speeds_mps.push_back(num(speeds[k], rp + idx(".leg_speeds", k)) * speed);
    }
    wc.route.departure_time_s = num_or(route, "departure_time_s", 0.0, rp);
    wc.route.loop = boolean_or(route, "loop", false, rp);
    const json& fixes = array_at(w, "override_track", p);
    for (std::size_t k = 0; k < fixes.size(); ++k) {
      const std::string fp = p + idx(".override_track", k);
      wc.override_track.push_back({num(fixes[k], "t_s", fp), point(fixes[k], fp)});
    }
    sc.watercraft.push_back(std::move(wc));
  }

  const json& facilities = array_at(doc, "facilities", "");
  for (std::size_t i = 0; i < facilities.size(); ++i) {
    const json& f = facilities[i];
    const std::string p = idx("facilities", i);
    sc.facilities.push_back({str(f, "id", p), point(need(f, "location", p), p + ".location"), integer(f, "role", p)});
  }

  const json& requests = array_at(doc, "requests", "");
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const json& r = requests[i];
    const std::string p = idx("requests", i);
    EvacRequest req;
    req.id = str(r, "id", p);
    req.time_s = num(r, "time_s", p);
    req.location = point(need(r, "location", p), p + ".location");
    auto prec = precedence_from_string(str(r, "precedence", p));
    if (!prec) throw ValidationError(p + ".precedence", "expected urgent, priority or routine");
    req.precedence = *prec;
    if (r.contains("patient_count")) req.patient_count = integer(r, "patient_count", p);
    req.destination = str(r, "destination", p);
    sc.requests.push_back(std::move(req));
  }

  validate(sc);
  return sc;
}

void validate(const Scenario& sc) {
  distance_factor(sc.distance_unit, "units.distance");
  speed_factor(sc.speed_unit, "units.speed");
  const ServiceConfig& c = sc.service;
  if (!(c.refuel_s >= 0.0)) throw ValidationError("service.refuel_s", "must be >= 0");
  if (!(c.noise_spread >= 0.0 && c.noise_spread < 1.0)) {
    throw ValidationError("service.noise_spread", "must be in [0, 1)");
  }
  if (!(c.launch_grid_s > 0.0)) throw ValidationError("service.launch_grid_s", "must be > 0");
  if (!(c.max_intercept_s > 0.0)) throw ValidationError("service.max_intercept_s", "must be > 0");
  for (double w : c.precedence_weights) {
    if (!(w > 0.0)) throw ValidationError("service.precedence_weights", "weights must be > 0");
  }

  std::set<std::string> entity_ids;
  auto unique_entity = [&](const std::string& id, const std::string& path) {
    if (!entity_ids.insert(id).second) throw ValidationError(path + ".id", "duplicate entity id '" + id + "'");
  };
  for (std::size_t i = 0; i < sc.aircraft.size(); ++i) {
    validate(sc.aircraft[i], idx("aircraft", i));
    unique_entity(sc.aircraft[i].id, idx("aircraft", i));
  }
  for (std::size_t i = 0; i < sc.watercraft.size(); ++i) {
    validate(sc.watercraft[i], idx("watercraft", i));
    unique_entity(sc.watercraft[i].id, idx("watercraft", i));
  }
  std::set<std::string> facility_ids;
  for (std::size_t i = 0; i < sc.facilities.size(); ++i) {
    const auto& f = sc.facilities[i];
    if (f.id.empty()) throw ValidationError(idx("facilities", i) + ".id", "must be non-empty");
    if (f.role != 2 && f.role != 3) throw ValidationError(idx("facilities", i) + ".role", "must be 2 or 3");
    if (!facility_ids.insert(f.id).second) {
      throw ValidationError(idx("facilities", i) + ".id", "duplicate facility id '" + f.id + "'");
    }
  }
  std::set<std::string> request_ids;
  for (std::size_t i = 0; i < sc.requests.size(); ++i) {
    const auto& r = sc.requests[i];
    const std::string p = idx("requests", i);
    if (r.id.empty()) throw ValidationError(p + ".id", "must be non-empty");
    if (!request_ids.insert(r.id).second) throw ValidationError(p + ".id", "duplicate request id '" + r.id + "'");
    if (!(r.time_s >= 0.0) || !std::isfinite(r.time_s)) throw ValidationError(p + ".time_s", "must be >= 0");
    if (r.patient_count < 1) throw ValidationError(p + ".patient_count", "must be >= 1");
    if (!facility_ids.count(r.destination)) {
      throw ValidationError(p + ".destination", "unknown facility '" + r.destination + "'");
    }
  }
}

std::string serialize_scenario(const Scenario& sc) {
  const double dist = distance_factor(sc.distance_unit, "units.distance");
  const double speed = speed_factor(sc.speed_unit, "units.speed");
  ordered_json doc;
  doc["schema_version"] = sc.schema_version;
  doc["id"] = sc.id;
  doc["units"] = {{"distance", sc.distance_unit}, {"speed", sc.speed_unit}};
  const ServiceConfig& c = sc.service;
  doc["service"] = {{"refuel_s", c.refuel_s},
                    {"stochastic", c.stochastic},
                    {"noise_spread", c.noise_spread},
                    {"precedence_weights",
                     {{"urgent", c.precedence_weights[0]},
                      {"priority", c.precedence_weights[1]},
                      {"routine", c.precedence_weights[2]}}},
                    {"launch_grid_s", c.launch_grid_s},
                    {"max_intercept_s", c.max_intercept_s},
                    {"stall_penalty_s", c.stall_penalty_s}};
  doc["aircraft"] = ordered_json::array();
  for (const auto& a : sc.aircraft) {
    doc["aircraft"].push_back({{"id", a.id},
                               {"home_base", point_json(a.home_base)},
                               {"cruise_speed", a.cruise_speed_mps / speed},
                               {"max_range", a.max_range.meters() / dist},
                               {"fuel_range_remaining", a.fuel_range_remaining.meters() / dist},
                               {"service_time_hoist_s", a.service_time_hoist_s},
                               {"service_time_land_s", a.service_time_land_s},
                               {"cabin_size", a.cabin_size},
                               {"can_deliver", a.can_deliver},
                               {"can_pickup", a.can_pickup}});
  }
  doc["watercraft"] = ordered_json::array();
  for (const auto& w : sc.watercraft) {
    ordered_json route;
    route["waypoints"] = ordered_json::array();
    for (const auto& p : w.route.waypoints) route["waypoints"].push_back(point_json(p));
    route["leg_speeds"] = ordered_json::array();
    for (double v : w.route.leg_speeds_mps) route["leg_speeds"].push_back(v / speed);
    route["departure_time_s"] = w.route.departure_time_s;
    route["loop"] = w.route.loop;
    ordered_json item = {{"id", w.id},
                         {"helipad", w.helipad},
                         {"refuel", w.refuel},
                         {"med_level", to_string(w.med_level)},
                         {"route", route}};
    if (!w.override_track.empty()) {
      item["override_track"] = ordered_json::array();
      for (const auto& f : w.override_track) {
        item["override_track"].push_back({{"t_s", f.t_s}, {"lat", f.position.lat()}, {"lon", f.position.lon()}});
      }
    }
    doc["watercraft"].push_back(std::move(item));
  }
  doc["facilities"] = ordered_json::array();
  for (const auto& f : sc.facilities) {
    doc["facilities"].push_back({{"id", f.id}, {"location", point_json(f.location)}, {"role", f.role}});
  }
  doc["requests"] = ordered_json::array();
  for (const auto& r : sc.requests) {
    doc["requests"].push_back({{"id", r.id},
                               {"time_s", r.time_s},
                               {"location", point_json(r.location)},
                               {"precedence", to_string(r.precedence)},
                               {"patient_count", r.patient_count},
                               {"destination", r.destination}});
  }
  return doc.dump(2) + "\n";
}

std::filesystem::path bundled_scenario_dir() { return MEDCHAIN_BUNDLED_SCENARIO_DIR; }

std::filesystem::path resolve_scenario_path(const std::string& path_or_id) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(path_or_id)) return path_or_id;
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("MEDCHAIN_SCENARIO_DIR"); env && *env) dirs.emplace_back(env);
  dirs.push_back(bundled_scenario_dir());
  for (const auto& d : dirs) {
    fs::path candidate = d / (path_or_id + ".json");
    if (fs::is_regular_file(candidate)) return candidate;
  }
  throw IoError("scenario not found: " + path_or_id);
}

Scenario load_scenario(const std::string& path_or_id) {
  const auto path = resolve_scenario_path(path_or_id);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

WorldState initial_state(const Scenario& sc) {
  return make_initial_state(sc.aircraft, sc.watercraft, sc.facilities, sc.requests, sc.service);
}

}  // namespace medchain
