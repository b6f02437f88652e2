#include "medchain/opsvc.hpp"

#include <algorithm>

#include "json_io.hpp"
#include "medchain/errors.hpp"

namespace medchain {

Session::Session(Scenario sc) : scenario_(std::move(sc)) {
  validate(scenario_);
  auto first = std::make_shared<SessionSnapshot>();
  first->state = advance_to(initial_state(scenario_), 0).next_state;
  snap_ = std::move(first);
}

std::shared_ptr<const SessionSnapshot> Session::snapshot() const {
  std::shared_lock lock(snap_mu_);
  return snap_;
}

std::uint64_t Session::publish(WorldState next, const std::string& type, const std::string& detail_json,
                               const std::vector<Event>& events) {
  auto snap = std::make_shared<SessionSnapshot>();
  snap->state = std::move(next);
  {
    std::unique_lock lock(snap_mu_);
    snap->revision = snap_->revision + 1;
    snap_ = snap;
  }
  json_io::Json doc;
  doc["revision"] = snap->revision;
  doc["clock_ms"] = snap->state.clock;
  doc["type"] = type;
  doc["detail"] = detail_json.empty() ? json_io::Json::object() : json_io::Json::parse(detail_json);
  doc["events"] = json_io::Json::array();
  for (const auto& e : events) doc["events"].push_back(json_io::event(e));
  Broadcast b{snap->revision, doc.dump()};

  std::vector<Subscriber> targets;
  {
    std::lock_guard lock(subs_mu_);
    for (const auto& [token, fn] : subs_) targets.push_back(fn);
  }
  for (const auto& fn : targets) fn(b);
  return snap->revision;
}

std::uint64_t Session::submit_request(EvacRequest req) {
  std::lock_guard writer(writer_mu_);
  const auto cur = snapshot();
  if (req.id.empty()) throw ValidationError("id", "must be non-empty");
  if (cur->state.knows_request(req.id)) throw ValidationError("id", "duplicate request id '" + req.id + "'");
  if (!cur->state.find_facility(req.destination)) {
    throw ValidationError("destination", "unknown facility '" + req.destination + "'");
  }
  if (req.patient_count < 1) throw ValidationError("patient_count", "must be >= 1");
  if (!(req.time_s >= 0.0) || !std::isfinite(req.time_s)) throw ValidationError("time_s", "must be >= 0");

  WorldState next = cur->state;
  const std::string detail = json_io::Json{{"request_id", req.id}}.dump();
  std::vector<Event> events;
  if (ceil_ms(req.time_s) <= next.clock) {
    events.push_back(Event{next.clock, EventKind::RequestArrival, "", req.id, "", ""});
    next.pending.push_back(std::move(req));
  } else {
    auto pos = std::find_if(next.scheduled.begin(), next.scheduled.end(), [&](const EvacRequest& r) {
      return std::make_tuple(ceil_ms(r.time_s), r.id) > std::make_tuple(ceil_ms(req.time_s), req.id);
    });
    next.scheduled.insert(pos, std::move(req));
  }
  return publish(std::move(next), "request", detail, events);
}

std::uint64_t Session::commit(const DispatchAction& a) {
  std::lock_guard writer(writer_mu_);
  const auto cur = snapshot();
  const std::string detail = json_io::Json{{"action", json_io::action(a)}}.dump();
  if (a.kind == ActionKind::hold) {
    if (!(a == DispatchAction::hold())) throw IllegalAction("hold carries no assignment fields");
    return publish(cur->state, "commit", detail, {});
  }
  Transition tr = commit_dispatch(cur->state, a, rng_);
  std::vector<Event> events = std::move(tr.events);
  // The session clock follows the operator to the committed launch.
  if (a.launch_time > tr.next_state.clock) {
    Transition moved = advance_to(tr.next_state, a.launch_time);
    events.insert(events.end(), moved.events.begin(), moved.events.end());
    tr.next_state = std::move(moved.next_state);
  }
  return publish(std::move(tr.next_state), "commit", detail, events);
}

std::uint64_t Session::ingest_position(const std::string& id, double t_s, const GeoPoint& p) {
  std::lock_guard writer(writer_mu_);
  const auto cur = snapshot();
  if (!std::isfinite(t_s) || t_s < 0.0) throw ValidationError("t_s", "must be >= 0");
  WorldState next = cur->state;
  Watercraft* w = next.find_watercraft(id);
  Aircraft* ac = next.find_aircraft(id);
  if (!w && !ac) throw UnknownEntity("unknown entity '" + id + "'");
  if (auto it = last_fix_.find(id); it != last_fix_.end() && t_s < it->second) {
    throw StaleFix("fix for " + id + " at t=" + std::to_string(t_s) + " s is older than the last fix at t=" +
                   std::to_string(it->second) + " s");
  }
  if (w) {
    auto& track = w->override_track;
    if (!track.empty() && track.back().t_s == t_s) {
      track.back().position = p;
    } else {
      track.push_back({t_s, p});
    }
  } else if (ac->status == AircraftStatus::idle && !ac->tasked) {
    ac->position = p;
  }
  last_fix_[id] = t_s;
  const std::string detail =
      json_io::Json{{"entity_id", id}, {"t_s", t_s}, {"position", json_io::point(p)}}.dump();
  return publish(std::move(next), "position", detail, {});
}

std::uint64_t Session::tick(double t_s) {
  std::lock_guard writer(writer_mu_);
  const auto cur = snapshot();
  if (!std::isfinite(t_s)) throw ValidationError("t_s", "must be finite");
  const TimeMs target = ceil_ms(t_s);
  if (target < cur->state.clock) throw ValidationError("t_s", "the session clock never moves backwards");
  Transition tr = advance_to(cur->state, target);
  const std::string detail = json_io::Json{{"to_ms", target}}.dump();
  return publish(std::move(tr.next_state), "tick", detail, tr.events);
}

Recommendation Session::recommend(const std::string& request_id, PlannerConfig cfg) const {
  const auto cur = snapshot();
  if (!cur->state.find_pending(request_id)) throw UnknownRequest("request not pending: " + request_id);
  cfg.focus_request = request_id;
  return plan(cur->state, cfg);
}

WhatIfResult Session::whatif(const std::string& request_id, const std::optional<std::string>& forced_axp,
                             const std::optional<std::string>& forced_aircraft, const PlannerConfig& cfg) const {
  const auto cur = snapshot();
  const WorldState& s = cur->state;
  const EvacRequest* req = s.find_pending(request_id);
  if (!req) throw UnknownRequest("request not pending: " + request_id);
  if (forced_axp && !s.find_watercraft(*forced_axp)) throw UnknownEntity("unknown watercraft '" + *forced_axp + "'");
  if (forced_aircraft && !s.find_aircraft(*forced_aircraft)) {
    throw UnknownEntity("unknown aircraft '" + *forced_aircraft + "'");
  }

  WhatIfResult out;
  if (!forced_axp && !forced_aircraft) {
    Recommendation rec = recommend(request_id, cfg);
    out.action = rec.action;
    out.timeline = rec.predicted_timeline;
    if (auto opt = evaluate_action(s, rec.action)) {
      out.total_time_s = to_seconds(opt->predicted_delivery) - req->time_s;
    }
    return out;
  }

  std::optional<DispatchOption> best;
  for (auto& opt : dispatch_options(s, request_id)) {
    if (forced_axp && opt.action.axp_watercraft_id != forced_axp) continue;
    if (forced_aircraft && opt.action.aircraft_id != *forced_aircraft) continue;
    if (!best || std::tie(opt.predicted_delivery, opt.action.aircraft_id, opt.action.receiving_aircraft_id) <
                     std::tie(best->predicted_delivery, best->action.aircraft_id, best->action.receiving_aircraft_id)) {
      best = std::move(opt);
    }
  }
  if (!best) {
    std::string what = "no feasible dispatch for " + request_id;
    if (forced_axp) what += " via " + *forced_axp;
    if (forced_aircraft) what += " with " + *forced_aircraft;
    throw Infeasible(what);
  }
  out.action = best->action;
  out.timeline = timeline_of(*best);
  out.total_time_s = to_seconds(best->predicted_delivery) - req->time_s;
  return out;
}

int Session::subscribe(Subscriber fn) {
  std::lock_guard lock(subs_mu_);
  const int token = next_token_++;
  subs_[token] = std::move(fn);
  return token;
}

void Session::unsubscribe(int token) {
  std::lock_guard lock(subs_mu_);
  subs_.erase(token);
}

}  // namespace medchain
