#include "medchain/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

#include "medchain/errors.hpp"

namespace medchain {

using ordered_json = nlohmann::ordered_json;

Policy greedy_policy_fn() {
  return [](const WorldState& s, std::uint64_t) { return greedy_policy(s); };
}

Policy mcts_policy_fn(PlannerConfig cfg) {
  return [cfg](const WorldState& s, std::uint64_t seed) {
    PlannerConfig c = cfg;
    c.seed = seed;
    c.stochastic = cfg.stochastic || s.config.stochastic;
    return plan(s, c).action;
  };
}

RunResult run(const Scenario& sc, const Policy& policy, std::uint64_t seed) {
  RandomStream rng(seed);
  RunResult out;
  Transition tr = begin_episode(initial_state(sc));
  out.log = std::move(tr.events);
  out.total_return = tr.reward;
  WorldState state = std::move(tr.next_state);
  for (std::uint64_t epoch = 0; !episode_over(state); ++epoch) {
    const DispatchAction a = policy(state, derive_seed(seed, epoch));
    tr = step(state, a, rng);
    out.total_return += tr.reward;
    out.log.insert(out.log.end(), tr.events.begin(), tr.events.end());
    state = std::move(tr.next_state);
  }
  std::stable_sort(out.log.begin(), out.log.end(), event_less);
  std::vector<std::string> ids;
  for (const auto& ac : sc.aircraft) ids.push_back(ac.id);
  out.metrics = compute_metrics(out.log, ids);
  out.final_state = std::move(state);
  return out;
}

Metrics compute_metrics(const std::vector<Event>& log, const std::vector<std::string>& aircraft_ids) {
  Metrics m;
  std::map<std::string, RequestMetrics> per;
  std::map<std::string, TimeMs> arrival;
  std::map<std::string, TimeMs> last_drop;
  std::map<std::string, TimeMs> launched;
  std::map<std::string, TimeMs> busy;
  for (const auto& id : aircraft_ids) busy[id] = 0;
  TimeMs horizon = 0;

  for (const auto& e : log) {
    horizon = std::max(horizon, e.t);
    if (!e.request.empty()) per[e.request].request_id = e.request;
    switch (e.kind) {
      case EventKind::RequestArrival:
        arrival[e.request] = e.t;
        break;
      case EventKind::ArrivePickup: {
        auto& r = per[e.request];
        if (!r.response_time_s && arrival.count(e.request)) r.response_time_s = to_seconds(e.t - arrival[e.request]);
        break;
      }
      case EventKind::PatientDropoff:
        last_drop[e.request] = e.t;
        break;
      case EventKind::PatientPickup:
        if (last_drop.count(e.request)) per[e.request].axp_dwell_s.push_back(to_seconds(e.t - last_drop[e.request]));
        break;
      case EventKind::Delivered:
        if (arrival.count(e.request)) per[e.request].time_to_facility_s = to_seconds(e.t - arrival[e.request]);
        break;
      case EventKind::Launch:
        launched[e.aircraft] = e.t;
        busy.try_emplace(e.aircraft, 0);
        break;
      case EventKind::RefuelComplete:
        if (auto it = launched.find(e.aircraft); it != launched.end()) {
          busy[e.aircraft] += e.t - it->second;
          launched.erase(it);
        }
        break;
      default:
        break;
    }
  }
  for (const auto& [id, since] : launched) busy[id] += horizon - since;
  for (auto& [id, r] : per) m.requests.push_back(std::move(r));
  for (const auto& [id, t] : busy) {
    m.utilization[id] = horizon > 0 ? static_cast<double>(t) / static_cast<double>(horizon) : 0.0;
  }
  return m;
}

std::string event_to_json(const Event& e) {
  ordered_json j;
  j["t_ms"] = e.t;
  j["kind"] = to_string(e.kind);
  if (!e.aircraft.empty()) j["aircraft"] = e.aircraft;
  if (!e.request.empty()) j["request"] = e.request;
  if (!e.watercraft.empty()) j["watercraft"] = e.watercraft;
  if (!e.facility.empty()) j["facility"] = e.facility;
  return j.dump();
}

std::string to_jsonl(const std::vector<Event>& log) {
  std::string out;
  for (const auto& e : log) {
    out += event_to_json(e);
    out += '\n';
  }
  return out;
}

std::vector<Event> parse_jsonl(std::string_view text) {
  std::vector<Event> log;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Event e;
      e.t = j.at("t_ms").get<TimeMs>();
      auto kind = event_kind_from_string(j.at("kind").get<std::string>());
      if (!kind) throw ParseError("unknown event kind");
      e.kind = *kind;
      e.aircraft = j.value("aircraft", "");
      e.request = j.value("request", "");
      e.watercraft = j.value("watercraft", "");
      e.facility = j.value("facility", "");
      log.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError("event log line " + std::to_string(lineno) + ": " + ex.what());
    } catch (const ParseError& ex) {
      throw ParseError("event log line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return log;
}

namespace {

enum class Phase { arrived, assigned, aboard, at_axp, delivered };

struct ReqTrack {
  Phase phase = Phase::arrived;
  std::string carrier;
  std::string watercraft;
};

struct AcTrack {
  GeoPoint pos;
  TimeMs t = 0;
  double flown = 0.0;  // since last refuel
};

}  // namespace

ReplayReport replay_check(const std::vector<Event>& log, const Scenario& sc) {
  auto fail = [](std::size_t i, const std::string& why) {
    return ReplayReport{false, "event " + std::to_string(i) + ": " + why};
  };
  std::map<std::string, const EvacRequest*> requests;
  for (const auto& r : sc.requests) requests[r.id] = &r;
  std::map<std::string, const Aircraft*> aircraft;
  std::map<std::string, AcTrack> tracks;
  for (const auto& a : sc.aircraft) {
    aircraft[a.id] = &a;
    tracks[a.id] = {a.home_base, 0, a.max_range.meters() - a.fuel_range_remaining.meters()};
  }
  std::map<std::string, const Watercraft*> fleet;
  for (const auto& w : sc.watercraft) fleet[w.id] = &w;
  std::map<std::string, const TreatmentFacility*> facilities;
  for (const auto& f : sc.facilities) facilities[f.id] = &f;
  std::map<std::string, ReqTrack> state;

  constexpr double kSlackM = 1.0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const Event& e = log[i];
    if (i > 0 && event_less(e, log[i - 1])) return fail(i, "log is not in time order");
    if (e.kind == EventKind::RequestArrival) {
      auto it = requests.find(e.request);
      if (it == requests.end()) return fail(i, "unknown request " + e.request);
      if (state.count(e.request)) return fail(i, "request " + e.request + " arrived twice");
      if (e.t != ceil_ms(it->second->time_s)) return fail(i, "arrival time differs from the scenario");
      state[e.request] = {};
      continue;
    }

    auto ac_it = aircraft.find(e.aircraft);
    if (ac_it == aircraft.end()) return fail(i, "unknown aircraft '" + e.aircraft + "'");
    const Aircraft& ac = *ac_it->second;
    ReqTrack* rq = nullptr;
    if (!e.request.empty()) {
      auto it = state.find(e.request);
      if (it == state.end()) return fail(i, "request " + e.request + " used before it arrived");
      rq = &it->second;
      if (rq->phase == Phase::delivered) return fail(i, "request " + e.request + " already delivered");
    }
    const Watercraft* wc = nullptr;
    if (!e.watercraft.empty()) {
      auto it = fleet.find(e.watercraft);
      if (it == fleet.end()) return fail(i, "unknown watercraft '" + e.watercraft + "'");
      wc = it->second;
    }
    const TreatmentFacility* fac = nullptr;
    if (!e.facility.empty()) {
      auto it = facilities.find(e.facility);
      if (it == facilities.end()) return fail(i, "unknown facility '" + e.facility + "'");
      fac = it->second;
    }

    std::optional<GeoPoint> where;
    switch (e.kind) {
      case EventKind::Launch:
        break;
      case EventKind::ArrivePickup:
        if (!rq || rq->phase != Phase::arrived) return fail(i, "pickup of a request that is not waiting");
        rq->phase = Phase::assigned;
        rq->carrier = ac.id;
        where = requests[e.request]->location;
        break;
      case EventKind::ServiceComplete:
        if (wc) {
          if (!rq || rq->phase != Phase::aboard || rq->carrier != ac.id) {
            return fail(i, "AXP service complete without the patient aboard");
          }
          where = watercraft_position(*wc, to_seconds(e.t));
        } else if (rq) {
          if (rq->phase != Phase::assigned || rq->carrier != ac.id) {
            return fail(i, "loading a patient the aircraft did not reach");
          }
          rq->phase = Phase::aboard;
          where = requests[e.request]->location;
        }
        break;
      case EventKind::ArriveAXP:
        if (!wc) return fail(i, "ArriveAXP without a watercraft");
        where = watercraft_position(*wc, to_seconds(e.t));
        break;
      case EventKind::PatientDropoff:
        if (!wc || !rq) return fail(i, "drop-off needs a request and a watercraft");
        if (rq->phase != Phase::aboard || rq->carrier != ac.id) return fail(i, "drop-off of a patient not aboard");
        rq->phase = Phase::at_axp;
        rq->carrier = wc->id;
        rq->watercraft = wc->id;
        where = watercraft_position(*wc, to_seconds(e.t));
        break;
      case EventKind::PatientPickup:
        if (!wc || !rq) return fail(i, "pickup needs a request and a watercraft");
        if (rq->phase != Phase::at_axp || rq->watercraft != wc->id) {
          return fail(i, "patient pickup before drop-off at " + wc->id);
        }
        rq->phase = Phase::aboard;
        rq->carrier = ac.id;
        where = watercraft_position(*wc, to_seconds(e.t));
        break;
      case EventKind::ArriveFacility:
      case EventKind::Delivered:
        if (!fac || !rq) return fail(i, "facility event needs a request and a facility");
        if (rq->phase != Phase::aboard || rq->carrier != ac.id) return fail(i, "delivery of a patient not aboard");
        if (requests[e.request]->destination != fac->id) return fail(i, "delivered to the wrong facility");
        if (e.kind == EventKind::Delivered) rq->phase = Phase::delivered;
        where = fac->location;
        break;
      case EventKind::RefuelComplete:
        where = ac.home_base;
        break;
      case EventKind::RequestArrival:
        break;
    }

    AcTrack& tr = tracks[ac.id];
    if (where) {
      const double d = gc_distance(tr.pos, *where).meters();
      const double reach = ac.cruise_speed_mps * to_seconds(e.t - tr.t);
      if (d > reach + kSlackM) {
        return fail(i, ac.id + " moved " + std::to_string(d) + " m in " + std::to_string(to_seconds(e.t - tr.t)) +
                           " s, faster than cruise speed");
      }
      tr.flown += d;
      if (tr.flown > ac.max_range.meters() + kSlackM) return fail(i, ac.id + " exceeded its maximum range");
      tr.pos = *where;
    }
    tr.t = e.t;
    if (e.kind == EventKind::RefuelComplete || (e.kind == EventKind::ArriveAXP && wc && wc->refuel)) {
      tr.flown = 0.0;
    }
  }
  return {};
}

Stat summarize(std::vector<double> values) {
  Stat s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  const std::size_t n = values.size();
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = values[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

MetricsSummary evaluate_policy(const Scenario& sc, const Policy& policy, int episodes, std::uint64_t seed) {
  if (episodes < 1) throw ValidationError("episodes", "must be >= 1");
  std::vector<double> response, ttf, dwell, util;
  for (int i = 0; i < episodes; ++i) {
    const RunResult r = run(sc, policy, derive_seed(seed, static_cast<std::uint64_t>(i)));
    for (const auto& rm : r.metrics.requests) {
      if (rm.response_time_s) response.push_back(*rm.response_time_s);
      if (rm.time_to_facility_s) ttf.push_back(*rm.time_to_facility_s);
      dwell.insert(dwell.end(), rm.axp_dwell_s.begin(), rm.axp_dwell_s.end());
    }
    for (const auto& [id, u] : r.metrics.utilization) util.push_back(u);
  }
  MetricsSummary out;
  out.episodes = episodes;
  out.response_time = summarize(std::move(response));
  out.time_to_facility = summarize(std::move(ttf));
  out.axp_dwell = summarize(std::move(dwell));
  out.utilization = summarize(std::move(util));
  return out;
}

}  // namespace medchain
