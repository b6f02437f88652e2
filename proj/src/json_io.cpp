#include "json_io.hpp"

#include "medchain/errors.hpp"

namespace medchain::json_io {

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(path.empty() ? key : path + "." + key, "required field missing");
  return *it;
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

std::string text(const nlohmann::json& j, const char* key, const std::string& path) {
  const auto& v = field(j, key, path);
  if (!v.is_string() || v.get_ref<const std::string&>().empty()) {
    throw ValidationError(join(path, key), "expected a non-empty string");
  }
  return v.get<std::string>();
}

std::optional<std::string> opt_text(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return text(j, key, path);
}

double number(const nlohmann::json& j, const char* key, const std::string& path) {
  const auto& v = field(j, key, path);
  if (!v.is_number()) throw ValidationError(join(path, key), "expected a number");
  return v.get<double>();
}

Json request(const EvacRequest& r) {
  return {{"id", r.id},
          {"time_s", r.time_s},
          {"location", point(r.location)},
          {"precedence", to_string(r.precedence)},
          {"patient_count", r.patient_count},
          {"destination", r.destination}};
}

}  // namespace

Json point(const GeoPoint& p) { return {{"lat", p.lat()}, {"lon", p.lon()}}; }

GeoPoint point_from(const nlohmann::json& j, const std::string& path) {
  const double lat = number(j, "lat", path);
  const double lon = number(j, "lon", path);
  try {
    return GeoPoint(lat, lon);
  } catch (const std::exception& e) {
    throw ValidationError(path, e.what());
  }
}

Json action(const DispatchAction& a) {
  Json j;
  j["kind"] = to_string(a.kind);
  if (a.kind == ActionKind::hold) return j;
  j["aircraft_id"] = a.aircraft_id;
  j["request_id"] = a.request_id;
  if (a.axp_watercraft_id) j["axp_watercraft_id"] = *a.axp_watercraft_id;
  if (a.receiving_aircraft_id) j["receiving_aircraft_id"] = *a.receiving_aircraft_id;
  j["launch_time_ms"] = a.launch_time;
  if (a.receiver_launch_time) j["receiver_launch_time_ms"] = *a.receiver_launch_time;
  return j;
}

DispatchAction action_from(const nlohmann::json& j) {
  auto kind = action_kind_from_string(text(j, "kind", ""));
  if (!kind) throw ValidationError("kind", "expected dispatch_direct, dispatch_via_axp or hold");
  DispatchAction a;
  a.kind = *kind;
  if (a.kind == ActionKind::hold) return a;
  a.aircraft_id = text(j, "aircraft_id", "");
  a.request_id = text(j, "request_id", "");
  a.axp_watercraft_id = opt_text(j, "axp_watercraft_id", "");
  a.receiving_aircraft_id = opt_text(j, "receiving_aircraft_id", "");
  const auto& lt = field(j, "launch_time_ms", "");
  if (!lt.is_number_integer()) throw ValidationError("launch_time_ms", "expected an integer");
  a.launch_time = lt.get<TimeMs>();
  if (j.contains("receiver_launch_time_ms") && !j.at("receiver_launch_time_ms").is_null()) {
    const auto& rt = j.at("receiver_launch_time_ms");
    if (!rt.is_number_integer()) throw ValidationError("receiver_launch_time_ms", "expected an integer");
    a.receiver_launch_time = rt.get<TimeMs>();
  }
  return a;
}

Json event(const Event& e) {
  Json j;
  j["t_ms"] = e.t;
  j["kind"] = to_string(e.kind);
  if (!e.aircraft.empty()) j["aircraft"] = e.aircraft;
  if (!e.request.empty()) j["request"] = e.request;
  if (!e.watercraft.empty()) j["watercraft"] = e.watercraft;
  if (!e.facility.empty()) j["facility"] = e.facility;
  return j;
}

Json timeline(const std::vector<TimelineEntry>& entries) {
  Json out = Json::array();
  for (const auto& t : entries) out.push_back(event(Event{t.t, t.kind, t.aircraft, t.request, t.watercraft, t.facility}));
  return out;
}

Json recommendation(const Recommendation& r) {
  Json counts = Json::array();
  for (const auto& vc : r.visit_counts) {
    counts.push_back({{"action", action(vc.action)}, {"count", vc.count}, {"mean_return", vc.mean_return}});
  }
  return {{"action", action(r.action)},
          {"estimated_return", r.estimated_return},
          {"visit_counts", counts},
          {"predicted_timeline", timeline(r.predicted_timeline)}};
}

Json whatif(const WhatIfResult& w) {
  return {{"action", action(w.action)}, {"timeline", timeline(w.timeline)}, {"total_time_s", w.total_time_s}};
}

Json state(const WorldState& s, std::uint64_t revision) {
  Json j;
  j["revision"] = revision;
  j["clock_ms"] = s.clock;
  j["stalled"] = s.stalled;
  j["aircraft"] = Json::array();
  for (const auto& a : s.aircraft) {
    j["aircraft"].push_back({{"id", a.id},
                             {"status", to_string(a.status)},
                             {"tasked", a.tasked},
                             {"position", point(aircraft_position(s, a))},
                             {"home_base", point(a.home_base)},
                             {"cruise_speed_mps", a.cruise_speed_mps},
                             {"max_range_m", a.max_range.meters()},
                             {"fuel_range_remaining_m", a.fuel_range_remaining.meters()},
                             {"can_deliver", a.can_deliver},
                             {"can_pickup", a.can_pickup}});
  }
  j["watercraft"] = Json::array();
  for (const auto& w : s.watercraft) {
    j["watercraft"].push_back({{"id", w.id},
                               {"position", point(watercraft_position(w, to_seconds(s.clock)))},
                               {"helipad", w.helipad},
                               {"refuel", w.refuel},
                               {"transfer_mode", to_string(transfer_mode(w))},
                               {"med_level", to_string(w.med_level)},
                               {"fixes", w.override_track.size()}});
  }
  j["facilities"] = Json::array();
  for (const auto& f : s.facilities) {
    j["facilities"].push_back({{"id", f.id}, {"location", point(f.location)}, {"role", f.role}});
  }
  j["pending"] = Json::array();
  for (const auto& r : s.pending) j["pending"].push_back(request(r));
  j["scheduled"] = Json::array();
  for (const auto& r : s.scheduled) j["scheduled"].push_back(request(r));
  j["in_transit"] = Json::array();
  for (const auto& t : s.in_transit) {
    j["in_transit"].push_back({{"request", request(t.request)}, {"carrier", t.carrier}, {"leg", to_string(t.leg)}});
  }
  j["delivered"] = Json::array();
  for (const auto& d : s.delivered) j["delivered"].push_back({{"request_id", d.request_id}, {"t_ms", d.time}});
  j["agenda"] = Json::array();
  for (const auto& e : s.agenda) {
    j["agenda"].push_back(event(Event{e.time, e.kind, e.aircraft, e.request, e.watercraft, e.facility}));
  }
  return j;
}

Json metrics(const Metrics& m) {
  Json reqs = Json::array();
  for (const auto& r : m.requests) {
    Json item;
    item["request_id"] = r.request_id;
    item["response_time_s"] = r.response_time_s ? Json(*r.response_time_s) : Json(nullptr);
    item["time_to_facility_s"] = r.time_to_facility_s ? Json(*r.time_to_facility_s) : Json(nullptr);
    item["axp_dwell_s"] = r.axp_dwell_s;
    reqs.push_back(std::move(item));
  }
  Json util = Json::object();
  for (const auto& [id, u] : m.utilization) util[id] = u;
  return {{"requests", reqs}, {"utilization", util}};
}

Json summary(const MetricsSummary& s) {
  auto stat = [](const Stat& st) {
    return Json{{"count", st.count}, {"mean", st.mean}, {"median", st.median}, {"p95", st.p95}};
  };
  return {{"episodes", s.episodes},
          {"response_time_s", stat(s.response_time)},
          {"time_to_facility_s", stat(s.time_to_facility)},
          {"axp_dwell_s", stat(s.axp_dwell)},
          {"utilization", stat(s.utilization)}};
}

Json plan(const TransferPlan& p) {
  Json legs = Json::array();
  for (const auto& l : p.legs) {
    legs.push_back({{"aircraft", l.aircraft_id},
                    {"from", {{"entity", l.from.entity}, {"point", point(l.from.point)}}},
                    {"to", {{"entity", l.to.entity}, {"point", point(l.to.point)}}},
                    {"depart_s", l.depart_s},
                    {"arrive_s", l.arrive_s},
                    {"refuel", l.refuel},
                    {"exchange_mode", to_string(l.exchange_mode)},
                    {"carrying_patient", l.carrying_patient}});
  }
  return {{"legs", legs},
          {"total_time_s", p.total_time_s},
          {"total_distance_m", p.total_distance.meters()},
          {"total_distance_mi", p.total_distance.statute_miles()},
          {"axp_watercraft", p.axp_watercraft()}};
}

EvacRequest request_from(const nlohmann::json& j, double default_time_s) {
  EvacRequest r;
  r.id = text(j, "id", "");
  if (j.contains("time_s") && !j.at("time_s").is_null()) {
    r.time_s = number(j, "time_s", "");
  } else {
    r.time_s = default_time_s;
  }
  r.location = point_from(field(j, "location", ""), "location");
  auto prec = precedence_from_string(text(j, "precedence", ""));
  if (!prec) throw ValidationError("precedence", "expected urgent, priority or routine");
  r.precedence = *prec;
  if (j.contains("patient_count")) {
    const auto& pc = j.at("patient_count");
    if (!pc.is_number_integer()) throw ValidationError("patient_count", "expected an integer");
    r.patient_count = pc.get<int>();
  }
  r.destination = text(j, "destination", "");
  return r;
}

PlannerConfig planner_config_from(const nlohmann::json& j, PlannerConfig base) {
  if (j.is_null()) return base;
  if (!j.is_object()) throw ValidationError("config", "expected an object");
  auto int_field = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer()) throw ValidationError(std::string("config.") + key, "expected an integer");
    out = j.at(key).get<int>();
  };
  int_field("iterations", base.iterations);
  int_field("max_rollout_depth", base.max_rollout_depth);
  int_field("workers", base.workers);
  if (j.contains("exploration_c")) base.exploration_c = number(j, "exploration_c", "config");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
      throw ValidationError("config.seed", "expected an unsigned integer");
    }
    base.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("stochastic")) {
    if (!j.at("stochastic").is_boolean()) throw ValidationError("config.stochastic", "expected true or false");
    base.stochastic = j.at("stochastic").get<bool>();
  }
  validate(base);
  return base;
}

}  // namespace medchain::json_io
