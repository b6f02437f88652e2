#include "medchain/smdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <tuple>

#include "medchain/errors.hpp"

namespace medchain {

const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::dispatch_direct: return "dispatch_direct";
    case ActionKind::dispatch_via_axp: return "dispatch_via_axp";
    case ActionKind::hold: return "hold";
  }
  return "?";
}

std::optional<ActionKind> action_kind_from_string(std::string_view s) {
  if (s == "dispatch_direct") return ActionKind::dispatch_direct;
  if (s == "dispatch_via_axp") return ActionKind::dispatch_via_axp;
  if (s == "hold") return ActionKind::hold;
  return std::nullopt;
}

bool action_less(const DispatchAction& a, const DispatchAction& b) {
  return std::tie(a.kind, a.aircraft_id, a.request_id, a.axp_watercraft_id, a.receiving_aircraft_id) <
         std::tie(b.kind, b.aircraft_id, b.request_id, b.axp_watercraft_id, b.receiving_aircraft_id);
}

std::string describe(const DispatchAction& a) {
  std::string out = to_string(a.kind);
  if (a.kind == ActionKind::hold) return out;
  out += "(" + a.aircraft_id + ", " + a.request_id;
  if (a.axp_watercraft_id) out += ", " + *a.axp_watercraft_id;
  if (a.receiving_aircraft_id) out += ", " + *a.receiving_aircraft_id;
  return out + ")";
}

bool event_less(const Event& a, const Event& b) {
  return std::tie(a.t, a.kind, a.aircraft, a.request, a.watercraft, a.facility) <
         std::tie(b.t, b.kind, b.aircraft, b.request, b.watercraft, b.facility);
}

namespace {

bool scheduled_less(const ScheduledEvent& a, const ScheduledEvent& b) {
  return std::tie(a.time, a.kind, a.aircraft, a.request, a.watercraft, a.facility) <
         std::tie(b.time, b.kind, b.aircraft, b.request, b.watercraft, b.facility);
}

TimeMs arrival_ms(const EvacRequest& r) { return ceil_ms(r.time_s); }

TimeMs grid_ceil(TimeMs t, const ServiceConfig& cfg) {
  const TimeMs g = std::max<TimeMs>(1, ceil_ms(cfg.launch_grid_s));
  return ((t + g - 1) / g) * g;
}

TimeMs flight_ms(double meters, double speed) { return ceil_ms(meters / speed); }

using Sampler = std::function<double(double)>;

double exact(double mean) { return mean; }

// Accumulates mission events, keeping each aircraft's events strictly increasing
// in time so causal order and log order coincide.
class MissionBuilder {
 public:
  TimeMs push(ScheduledEvent ev) {
    auto it = last_.find(ev.aircraft);
    if (it != last_.end() && ev.time <= it->second) ev.time = it->second + 1;
    if (ev.leg_arrive < ev.leg_depart) ev.leg_arrive = ev.leg_depart;
    last_[ev.aircraft] = ev.time;
    events_.push_back(std::move(ev));
    return events_.back().time;
  }
  std::vector<ScheduledEvent> take() { return std::move(events_); }

 private:
  std::map<std::string, TimeMs> last_;
  std::vector<ScheduledEvent> events_;
};

ScheduledEvent make_event(TimeMs t, EventKind kind, const std::string& aircraft, const GeoPoint& where) {
  ScheduledEvent ev;
  ev.time = t;
  ev.kind = kind;
  ev.aircraft = aircraft;
  ev.where = where;
  ev.leg_depart = t;
  ev.leg_arrive = t;
  return ev;
}

bool refuels_at(const Aircraft& ac, const GeoPoint& p) { return colocated(p, ac.home_base); }

bool available(const Aircraft& ac) { return ac.status == AircraftStatus::idle && !ac.tasked; }

// Flight from `from` at `depart` to point `to`; returns arrival time.
struct FlightLeg {
  TimeMs arrive;
  double meters;
};

FlightLeg fly(const Aircraft& ac, const GeoPoint& from, TimeMs depart, const GeoPoint& to) {
  const double d = gc_distance(from, to).meters();
  return {depart + flight_ms(d, ac.cruise_speed_mps), d};
}

// Pickup aircraft: launch, fly to the point of injury, load the patient.
struct PickupPart {
  TimeMs loaded_at = 0;
  double fuel = 0.0;
};

std::optional<PickupPart> build_pickup(const WorldState& s, const Aircraft& ac, const EvacRequest& req,
                                       TimeMs launch, const Sampler& sample, MissionBuilder& mb) {
  double fuel = ac.fuel_range_remaining.meters();
  const GeoPoint& start = ac.position;
  if (!leg_feasible(LengthM(fuel), start, req.location, refuels_at(ac, req.location))) return std::nullopt;
  mb.push(make_event(launch, EventKind::Launch, ac.id, start));
  const FlightLeg leg = fly(ac, start, launch, req.location);
  auto arrive = make_event(leg.arrive, EventKind::ArrivePickup, ac.id, req.location);
  arrive.request = req.id;
  arrive.leg_depart = launch;
  arrive.fuel_burn_m = leg.meters;
  const TimeMs t_arrive = mb.push(arrive);
  fuel -= leg.meters;

  auto loaded = make_event(t_arrive + ceil_ms(sample(ac.service_time_land_s)), EventKind::ServiceComplete,
                           ac.id, req.location);
  loaded.request = req.id;
  loaded.loads_patient = true;
  const TimeMs t_loaded = mb.push(loaded);
  (void)s;
  return PickupPart{t_loaded, fuel};
}

// Carrier with the patient aboard at `from`/`depart` flies to the facility, delivers,
// and returns home.
std::optional<TimeMs> build_delivery(const WorldState& s, const Aircraft& ac, const EvacRequest& req,
                                     const TreatmentFacility& fac, const GeoPoint& from, TimeMs depart,
                                     double fuel, const Sampler& sample, MissionBuilder& mb) {
  if (!leg_feasible(LengthM(std::max(0.0, fuel)), from, fac.location, refuels_at(ac, fac.location))) {
    return std::nullopt;
  }
  const FlightLeg leg = fly(ac, from, depart, fac.location);
  fuel -= leg.meters;
  const double home_leg = gc_distance(fac.location, ac.home_base).meters();
  if (home_leg > fuel + kFeasibilityToleranceM) return std::nullopt;

  auto arrive = make_event(leg.arrive, EventKind::ArriveFacility, ac.id, fac.location);
  arrive.request = req.id;
  arrive.facility = fac.id;
  arrive.leg_depart = depart;
  arrive.fuel_burn_m = leg.meters;
  const TimeMs t_arrive = mb.push(arrive);

  auto delivered = make_event(t_arrive + ceil_ms(sample(ac.service_time_land_s)), EventKind::Delivered, ac.id,
                              fac.location);
  delivered.request = req.id;
  delivered.facility = fac.id;
  const TimeMs t_delivered = mb.push(delivered);

  const FlightLeg back = fly(ac, fac.location, t_delivered, ac.home_base);
  auto refuel = make_event(back.arrive + ceil_ms(s.config.refuel_s), EventKind::RefuelComplete, ac.id,
                           ac.home_base);
  refuel.leg_depart = t_delivered;
  refuel.leg_arrive = back.arrive;
  refuel.fuel_burn_m = back.meters;
  refuel.refuel_here = true;
  mb.push(refuel);
  return t_delivered;
}

struct Resolved {
  const Aircraft* pickup = nullptr;
  const EvacRequest* request = nullptr;
  const TreatmentFacility* facility = nullptr;
  const Watercraft* axp = nullptr;
  const Aircraft* receiver = nullptr;
};

std::optional<Resolved> resolve(const WorldState& s, const DispatchAction& a) {
  Resolved r;
  r.pickup = s.find_aircraft(a.aircraft_id);
  r.request = s.find_pending(a.request_id);
  if (!r.pickup || !r.request || !available(*r.pickup) || !r.pickup->can_pickup) return std::nullopt;
  r.facility = s.find_facility(r.request->destination);
  if (!r.facility) return std::nullopt;
  if (r.request->patient_count > r.pickup->cabin_size) return std::nullopt;
  if (a.kind == ActionKind::dispatch_direct) {
    if (a.axp_watercraft_id || a.receiving_aircraft_id || a.receiver_launch_time) return std::nullopt;
    if (!r.pickup->can_deliver) return std::nullopt;
    return r;
  }
  if (a.kind != ActionKind::dispatch_via_axp || !a.axp_watercraft_id || !a.receiving_aircraft_id) {
    return std::nullopt;
  }
  r.axp = s.find_watercraft(*a.axp_watercraft_id);
  r.receiver = s.find_aircraft(*a.receiving_aircraft_id);
  if (!r.axp || !r.receiver || r.receiver == r.pickup) return std::nullopt;
  if (!available(*r.receiver) || !r.receiver->can_deliver) return std::nullopt;
  if (r.request->patient_count > r.receiver->cabin_size) return std::nullopt;
  return r;
}

std::optional<DispatchOption> build_direct(const WorldState& s, const Resolved& r, const Sampler& sample) {
  DispatchOption opt;
  opt.action.kind = ActionKind::dispatch_direct;
  opt.action.aircraft_id = r.pickup->id;
  opt.action.request_id = r.request->id;
  opt.action.launch_time = grid_ceil(s.clock, s.config);
  MissionBuilder mb;
  auto pickup = build_pickup(s, *r.pickup, *r.request, opt.action.launch_time, sample, mb);
  if (!pickup) return std::nullopt;
  auto delivered = build_delivery(s, *r.pickup, *r.request, *r.facility, r.request->location, pickup->loaded_at,
                                  pickup->fuel, sample, mb);
  if (!delivered) return std::nullopt;
  opt.predicted_delivery = *delivered;
  opt.mission = mb.take();
  return opt;
}

std::optional<TimeMs> intercept_ms(const WorldState& s, const Aircraft& ac, const GeoPoint& from, TimeMs depart,
                                   const Watercraft& w) {
  auto t = intercept_time(from, to_seconds(depart), ac.cruise_speed_mps, w, s.config.max_intercept_s);
  if (!t) return std::nullopt;
  return std::max(depart, ceil_ms(*t));
}

// Earliest launch-grid time from which the receiver reaches the AXP strictly after
// the drop-off.
std::optional<TimeMs> receiver_launch(const WorldState& s, const Aircraft& rx, const Watercraft& w,
                                      TimeMs dropoff) {
  const TimeMs g = std::max<TimeMs>(1, ceil_ms(s.config.launch_grid_s));
  const TimeMs earliest = grid_ceil(s.clock, s.config);
  auto arrival = [&](TimeMs launch) { return intercept_ms(s, rx, rx.position, launch, w); };
  auto first = arrival(earliest);
  if (!first) return std::nullopt;
  if (*first > dropoff) return earliest;
  TimeMs launch = std::max(earliest, grid_ceil(dropoff - (*first - earliest), s.config));
  for (int guard = 0; guard < 100000; ++guard) {
    auto t = arrival(launch);
    if (!t) return std::nullopt;
    if (*t > dropoff) break;
    launch += g;
  }
  while (launch - g >= earliest) {
    auto t = arrival(launch - g);
    if (!t || *t <= dropoff) break;
    launch -= g;
  }
  return launch;
}

std::optional<DispatchOption> build_via(const WorldState& s, const Resolved& r, const Sampler& sample,
                                        std::optional<TimeMs> given_receiver_launch) {
  const Aircraft& pk = *r.pickup;
  const Aircraft& rx = *r.receiver;
  const Watercraft& w = *r.axp;
  const EvacRequest& req = *r.request;

  DispatchOption opt;
  opt.action.kind = ActionKind::dispatch_via_axp;
  opt.action.aircraft_id = pk.id;
  opt.action.request_id = req.id;
  opt.action.axp_watercraft_id = w.id;
  opt.action.receiving_aircraft_id = rx.id;
  opt.action.launch_time = grid_ceil(s.clock, s.config);

  MissionBuilder mb;
  auto pickup = build_pickup(s, pk, req, opt.action.launch_time, sample, mb);
  if (!pickup) return std::nullopt;

  // Pickup aircraft to the AXP, hand the patient over, go home.
  auto t_meet = intercept_ms(s, pk, req.location, pickup->loaded_at, w);
  if (!t_meet) return std::nullopt;
  const GeoPoint meet = watercraft_position(w, to_seconds(*t_meet));
  double fuel = pickup->fuel;
  if (!leg_feasible(LengthM(fuel), req.location, meet, w.refuel || refuels_at(pk, meet))) return std::nullopt;
  const double d_meet = gc_distance(req.location, meet).meters();
  auto arrive = make_event(*t_meet, EventKind::ArriveAXP, pk.id, meet);
  arrive.request = req.id;
  arrive.watercraft = w.id;
  arrive.leg_depart = pickup->loaded_at;
  arrive.fuel_burn_m = d_meet;
  arrive.refuel_here = w.refuel;
  const TimeMs t_arrive = mb.push(arrive);
  fuel = w.refuel ? pk.max_range.meters() : fuel - d_meet;

  const TransferMode mode = transfer_mode(w);
  const double svc_pk = sample(mode == TransferMode::hoist ? pk.service_time_hoist_s : pk.service_time_land_s);
  const double hover_pk = mode == TransferMode::hoist ? svc_pk * pk.cruise_speed_mps : 0.0;
  fuel -= hover_pk;
  TimeMs t_drop = t_arrive + ceil_ms(svc_pk);
  auto drop = make_event(t_drop, EventKind::PatientDropoff, pk.id, watercraft_position(w, to_seconds(t_drop)));
  drop.request = req.id;
  drop.watercraft = w.id;
  drop.fuel_burn_m = hover_pk;
  t_drop = mb.push(drop);
  const GeoPoint drop_at = watercraft_position(w, to_seconds(t_drop));
  const FlightLeg home = fly(pk, drop_at, t_drop, pk.home_base);
  if (fuel < 0.0 || home.meters > fuel + kFeasibilityToleranceM) return std::nullopt;
  auto pk_refuel = make_event(home.arrive + ceil_ms(s.config.refuel_s), EventKind::RefuelComplete, pk.id,
                              pk.home_base);
  pk_refuel.leg_depart = t_drop;
  pk_refuel.leg_arrive = home.arrive;
  pk_refuel.fuel_burn_m = home.meters;
  pk_refuel.refuel_here = true;
  mb.push(pk_refuel);

  // Receiver: timed to arrive just after the drop-off.
  std::optional<TimeMs> rx_launch = given_receiver_launch;
  if (!rx_launch) rx_launch = receiver_launch(s, rx, w, t_drop);
  if (!rx_launch || *rx_launch < opt.action.launch_time) return std::nullopt;
  opt.action.receiver_launch_time = *rx_launch;
  auto t_rx = intercept_ms(s, rx, rx.position, *rx_launch, w);
  if (!t_rx) return std::nullopt;
  const GeoPoint rx_meet = watercraft_position(w, to_seconds(*t_rx));
  double rx_fuel = rx.fuel_range_remaining.meters();
  if (!leg_feasible(LengthM(rx_fuel), rx.position, rx_meet, w.refuel || refuels_at(rx, rx_meet))) {
    return std::nullopt;
  }
  const double d_rx = gc_distance(rx.position, rx_meet).meters();
  mb.push(make_event(*rx_launch, EventKind::Launch, rx.id, rx.position));
  auto rx_arrive = make_event(*t_rx, EventKind::ArriveAXP, rx.id, rx_meet);
  rx_arrive.request = req.id;
  rx_arrive.watercraft = w.id;
  rx_arrive.leg_depart = *rx_launch;
  rx_arrive.fuel_burn_m = d_rx;
  rx_arrive.refuel_here = w.refuel;
  const TimeMs t_rx_arrive = mb.push(rx_arrive);
  rx_fuel = w.refuel ? rx.max_range.meters() : rx_fuel - d_rx;

  const TimeMs t_pick_req = std::max(t_rx_arrive, t_drop);
  auto pick = make_event(t_pick_req, EventKind::PatientPickup, rx.id, watercraft_position(w, to_seconds(t_pick_req)));
  pick.request = req.id;
  pick.watercraft = w.id;
  const TimeMs t_pick = mb.push(pick);

  const double svc_rx = sample(mode == TransferMode::hoist ? rx.service_time_hoist_s : rx.service_time_land_s);
  const double hover_rx = mode == TransferMode::hoist ? svc_rx * rx.cruise_speed_mps : 0.0;
  rx_fuel -= hover_rx;
  const TimeMs t_done_req = t_pick + ceil_ms(svc_rx);
  auto done = make_event(t_done_req, EventKind::ServiceComplete, rx.id, watercraft_position(w, to_seconds(t_done_req)));
  done.request = req.id;
  done.watercraft = w.id;
  done.fuel_burn_m = hover_rx;
  const TimeMs t_done = mb.push(done);
  if (rx_fuel < 0.0) return std::nullopt;

  const GeoPoint leave_at = watercraft_position(w, to_seconds(t_done));
  auto delivered = build_delivery(s, rx, req, *r.facility, leave_at, t_done, rx_fuel, sample, mb);
  if (!delivered) return std::nullopt;
  opt.predicted_delivery = *delivered;
  opt.mission = mb.take();
  return opt;
}

std::optional<DispatchOption> build(const WorldState& s, const DispatchAction& a, const Sampler& sample,
                                    bool use_given_receiver_launch) {
  auto r = resolve(s, a);
  if (!r) return std::nullopt;
  if (a.kind == ActionKind::dispatch_direct) return build_direct(s, *r, sample);
  return build_via(s, *r, sample,
                   use_given_receiver_launch ? a.receiver_launch_time : std::optional<TimeMs>{});
}

std::vector<DispatchOption> enumerate(const WorldState& s, bool stop_at_first,
                                      std::optional<std::string_view> only_request = std::nullopt) {
  std::vector<DispatchOption> out;
  if (s.pending.empty()) return out;
  std::vector<const Aircraft*> idle;
  for (const auto& ac : s.aircraft) if (available(ac)) idle.push_back(&ac);
  if (idle.empty()) return out;
  std::sort(idle.begin(), idle.end(), [](const Aircraft* a, const Aircraft* b) { return a->id < b->id; });
  std::vector<const EvacRequest*> reqs;
  for (const auto& r : s.pending) {
    if (!only_request || r.id == *only_request) reqs.push_back(&r);
  }
  std::sort(reqs.begin(), reqs.end(), [](const EvacRequest* a, const EvacRequest* b) { return a->id < b->id; });
  std::vector<const Watercraft*> fleet;
  for (const auto& w : s.watercraft) fleet.push_back(&w);
  std::sort(fleet.begin(), fleet.end(), [](const Watercraft* a, const Watercraft* b) { return a->id < b->id; });

  Sampler sample = exact;
  for (const Aircraft* ac : idle) {
    for (const EvacRequest* req : reqs) {
      DispatchAction a;
      a.kind = ActionKind::dispatch_direct;
      a.aircraft_id = ac->id;
      a.request_id = req->id;
      if (auto opt = build(s, a, sample, false)) {
        out.push_back(std::move(*opt));
        if (stop_at_first) return out;
      }
    }
  }
  for (const Aircraft* ac : idle) {
    for (const EvacRequest* req : reqs) {
      for (const Watercraft* w : fleet) {
        for (const Aircraft* rx : idle) {
          if (rx == ac) continue;
          DispatchAction a;
          a.kind = ActionKind::dispatch_via_axp;
          a.aircraft_id = ac->id;
          a.request_id = req->id;
          a.axp_watercraft_id = w->id;
          a.receiving_aircraft_id = rx->id;
          if (auto opt = build(s, a, sample, false)) {
            out.push_back(std::move(*opt));
            if (stop_at_first) return out;
          }
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const DispatchOption& x, const DispatchOption& y) { return action_less(x.action, y.action); });
  return out;
}

// ---------------------------------------------------------------------------
// Event processing

struct Accum {
  double reward = 0.0;
  std::vector<Event> events;
};

InTransit* find_transit(WorldState& s, const std::string& id) {
  for (auto& t : s.in_transit) if (t.request.id == id) return &t;
  return nullptr;
}

void accrue(WorldState& s, TimeMs until, Accum& acc) {
  if (until <= s.clock) return;
  acc.reward -= undelivered_weight(s) * to_seconds(until - s.clock);
  s.clock = until;
}

void apply(WorldState& s, const ScheduledEvent& ev, Accum& acc) {
  acc.events.push_back(Event{ev.time, ev.kind, ev.aircraft, ev.request, ev.watercraft, ev.facility});
  Aircraft* ac = s.find_aircraft(ev.aircraft);
  if (ac) {
    ac->fuel_range_remaining = LengthM(std::max(0.0, ac->fuel_range_remaining.meters() - ev.fuel_burn_m));
  }
  switch (ev.kind) {
    case EventKind::Launch:
      if (ac) ac->status = AircraftStatus::enroute;
      break;
    case EventKind::ArrivePickup:
    case EventKind::ArriveAXP:
    case EventKind::ArriveFacility:
      if (ac) {
        ac->status = AircraftStatus::on_station;
        ac->position = ev.where;
        if (ev.refuel_here) ac->fuel_range_remaining = ac->max_range;
      }
      break;
    case EventKind::ServiceComplete:
      if (ac) {
        ac->status = AircraftStatus::enroute;
        ac->position = ev.where;
      }
      if (ev.loads_patient) {
        if (auto* t = find_transit(s, ev.request)) {
          t->carrier = ev.aircraft;
          t->leg = TransitLeg::aboard;
        }
      }
      break;
    case EventKind::PatientDropoff:
      if (ac) {
        ac->status = AircraftStatus::returning;
        ac->position = ev.where;
      }
      if (auto* t = find_transit(s, ev.request)) {
        t->carrier = ev.watercraft;
        t->leg = TransitLeg::at_axp;
      }
      break;
    case EventKind::PatientPickup:
      if (ac) ac->position = ev.where;
      if (auto* t = find_transit(s, ev.request)) {
        t->carrier = ev.aircraft;
        t->leg = TransitLeg::aboard;
      }
      break;
    case EventKind::Delivered: {
      if (ac) ac->status = AircraftStatus::returning;
      auto it = std::find_if(s.in_transit.begin(), s.in_transit.end(),
                             [&](const InTransit& t) { return t.request.id == ev.request; });
      if (it != s.in_transit.end()) s.in_transit.erase(it);
      s.delivered.push_back(Delivery{ev.request, ev.time});
      break;
    }
    case EventKind::RefuelComplete:
      if (ac) {
        ac->status = AircraftStatus::idle;
        ac->tasked = false;
        ac->position = ev.where;
        ac->fuel_range_remaining = ac->max_range;
      }
      break;
    case EventKind::RequestArrival:
      break;
  }
}

// Applies every agenda item and arrival due at or before the clock, in log order.
void process_due(WorldState& s, Accum& acc) {
  for (;;) {
    const bool agenda_due = !s.agenda.empty() && s.agenda.front().time <= s.clock;
    const bool arrival_due = !s.scheduled.empty() && arrival_ms(s.scheduled.front()) <= s.clock;
    if (!agenda_due && !arrival_due) return;
    bool take_arrival = arrival_due;
    if (agenda_due && arrival_due) {
      // Arrivals sort first at equal times (RequestArrival is the lowest kind).
      take_arrival = arrival_ms(s.scheduled.front()) <= s.agenda.front().time;
    }
    if (take_arrival) {
      EvacRequest r = s.scheduled.front();
      s.scheduled.erase(s.scheduled.begin());
      acc.events.push_back(Event{arrival_ms(r), EventKind::RequestArrival, "", r.id, "", ""});
      s.pending.push_back(std::move(r));
    } else {
      ScheduledEvent ev = s.agenda.front();
      s.agenda.erase(s.agenda.begin());
      apply(s, ev, acc);
    }
  }
}

void stall(WorldState& s, Accum& acc) {
  acc.reward -= undelivered_weight(s) * s.config.stall_penalty_s;
  s.stalled = true;
}

void run_until_epoch(WorldState& s, Accum& acc) {
  process_due(s, acc);
  for (;;) {
    if (is_terminal(s) || has_dispatch_option(s)) return;
    auto next = next_event_time(s);
    if (!next) {
      stall(s, acc);
      return;
    }
    accrue(s, *next, acc);
    process_due(s, acc);
  }
}

void commit(WorldState& s, DispatchOption opt) {
  auto it = std::find_if(s.pending.begin(), s.pending.end(),
                         [&](const EvacRequest& r) { return r.id == opt.action.request_id; });
  s.in_transit.push_back(InTransit{*it, "", TransitLeg::awaiting_pickup});
  s.pending.erase(it);
  s.find_aircraft(opt.action.aircraft_id)->tasked = true;
  if (opt.action.receiving_aircraft_id) s.find_aircraft(*opt.action.receiving_aircraft_id)->tasked = true;
  for (auto& ev : opt.mission) s.agenda.push_back(std::move(ev));
  std::sort(s.agenda.begin(), s.agenda.end(), scheduled_less);
}

Transition finish(const WorldState& before, WorldState after, Accum acc) {
  Transition tr;
  tr.sojourn = after.clock - before.clock;
  tr.reward = acc.reward;
  tr.terminal = episode_over(after);
  tr.events = std::move(acc.events);
  tr.next_state = std::move(after);
  return tr;
}

}  // namespace

WorldState make_initial_state(std::vector<Aircraft> aircraft, std::vector<Watercraft> watercraft,
                              std::vector<TreatmentFacility> facilities, std::vector<EvacRequest> requests,
                              ServiceConfig config) {
  WorldState s;
  s.aircraft = std::move(aircraft);
  for (auto& ac : s.aircraft) ac.position = ac.home_base;
  s.watercraft = std::move(watercraft);
  s.facilities = std::move(facilities);
  s.scheduled = std::move(requests);
  std::sort(s.scheduled.begin(), s.scheduled.end(), [](const EvacRequest& a, const EvacRequest& b) {
    return std::make_tuple(arrival_ms(a), a.id) < std::make_tuple(arrival_ms(b), b.id);
  });
  s.config = config;
  return s;
}

std::vector<DispatchOption> dispatch_options(const WorldState& s) { return enumerate(s, false); }

std::vector<DispatchOption> dispatch_options(const WorldState& s, std::string_view request_id) {
  return enumerate(s, false, request_id);
}

bool has_dispatch_option(const WorldState& s) { return !enumerate(s, true).empty(); }

std::vector<DispatchAction> legal_actions(const WorldState& s) {
  std::vector<DispatchAction> out;
  if (!episode_over(s)) {
    for (auto& opt : dispatch_options(s)) out.push_back(std::move(opt.action));
  }
  out.push_back(DispatchAction::hold());
  return out;
}

std::optional<DispatchOption> evaluate_action(const WorldState& s, const DispatchAction& a) {
  if (a.kind == ActionKind::hold || episode_over(s)) return std::nullopt;
  auto opt = build(s, a, exact, false);
  if (!opt || !(opt->action == a)) return std::nullopt;
  return opt;
}

namespace {

// Legality is judged on the deterministic mission; stochastic mode then
// resamples service durations around it.
DispatchOption realize(const WorldState& s, const DispatchAction& a, RandomStream& rng) {
  auto det = evaluate_action(s, a);
  if (!det) throw IllegalAction("not a legal action in this state: " + describe(a));
  if (s.config.stochastic) {
    const double spread = s.config.noise_spread;
    Sampler noisy = [&rng, spread](double mean) { return mean * rng.triangular(1.0 - spread, 1.0, 1.0 + spread); };
    if (auto sampled = build(s, a, noisy, true)) return std::move(*sampled);
  }
  return std::move(*det);
}

}  // namespace

Transition step(const WorldState& s, const DispatchAction& a, RandomStream& rng) {
  if (episode_over(s)) throw IllegalAction("episode is over; no actions are legal");
  WorldState next = s;
  Accum acc;
  if (a.kind == ActionKind::hold) {
    if (!(a == DispatchAction::hold())) throw IllegalAction("hold carries no assignment fields");
    auto t = next_event_time(next);
    if (!t) {
      stall(next, acc);
    } else {
      accrue(next, *t, acc);
      run_until_epoch(next, acc);
    }
    return finish(s, std::move(next), std::move(acc));
  }

  commit(next, realize(s, a, rng));
  run_until_epoch(next, acc);
  return finish(s, std::move(next), std::move(acc));
}

Transition commit_dispatch(const WorldState& s, const DispatchAction& a, RandomStream& rng) {
  if (a.kind == ActionKind::hold) throw IllegalAction("hold is not a dispatch");
  if (episode_over(s)) throw IllegalAction("episode is over; no actions are legal");
  WorldState next = s;
  Accum acc;
  commit(next, realize(s, a, rng));
  process_due(next, acc);
  return finish(s, std::move(next), std::move(acc));
}

Transition begin_episode(const WorldState& s) {
  WorldState next = s;
  Accum acc;
  run_until_epoch(next, acc);
  return finish(s, std::move(next), std::move(acc));
}

Transition advance_to(const WorldState& s, TimeMs t) {
  WorldState next = s;
  Accum acc;
  process_due(next, acc);
  for (;;) {
    auto nt = next_event_time(next);
    if (!nt || *nt > t) break;
    accrue(next, *nt, acc);
    process_due(next, acc);
  }
  accrue(next, t, acc);
  return finish(s, std::move(next), std::move(acc));
}

bool is_terminal(const WorldState& s) {
  return s.pending.empty() && s.in_transit.empty() && s.scheduled.empty();
}

bool episode_over(const WorldState& s) { return s.stalled || is_terminal(s); }

double undelivered_weight(const WorldState& s) {
  double w = 0.0;
  for (const auto& r : s.pending) w += s.config.weight(r.precedence) * r.patient_count;
  for (const auto& t : s.in_transit) w += s.config.weight(t.request.precedence) * t.request.patient_count;
  return w;
}

std::optional<TimeMs> next_event_time(const WorldState& s) {
  std::optional<TimeMs> t;
  if (!s.agenda.empty()) t = s.agenda.front().time;
  if (!s.scheduled.empty()) {
    const TimeMs a = arrival_ms(s.scheduled.front());
    if (!t || a < *t) t = a;
  }
  if (t && *t < s.clock) t = s.clock;
  return t;
}

}  // namespace medchain
