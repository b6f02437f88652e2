#include "medchain/world.hpp"

#include <algorithm>
#include <cmath>

#include "medchain/errors.hpp"

namespace medchain {

const char* to_string(Precedence p) {
  switch (p) {
    case Precedence::urgent: return "urgent";
    case Precedence::priority: return "priority";
    case Precedence::routine: return "routine";
  }
  return "?";
}

const char* to_string(AircraftStatus s) {
  switch (s) {
    case AircraftStatus::idle: return "idle";
    case AircraftStatus::enroute: return "enroute";
    case AircraftStatus::on_station: return "on_station";
    case AircraftStatus::returning: return "returning";
  }
  return "?";
}

const char* to_string(MedLevel m) {
  switch (m) {
    case MedLevel::none: return "none";
    case MedLevel::medic: return "medic";
    case MedLevel::role2: return "role2";
  }
  return "?";
}

const char* to_string(TransferMode m) { return m == TransferMode::land ? "land" : "hoist"; }

const char* to_string(TransitLeg leg) {
  switch (leg) {
    case TransitLeg::awaiting_pickup: return "awaiting_pickup";
    case TransitLeg::aboard: return "aboard";
    case TransitLeg::at_axp: return "at_axp";
  }
  return "?";
}

std::optional<Precedence> precedence_from_string(std::string_view s) {
  if (s == "urgent") return Precedence::urgent;
  if (s == "priority") return Precedence::priority;
  if (s == "routine") return Precedence::routine;
  return std::nullopt;
}

std::optional<MedLevel> med_level_from_string(std::string_view s) {
  if (s == "none") return MedLevel::none;
  if (s == "medic") return MedLevel::medic;
  if (s == "role2") return MedLevel::role2;
  return std::nullopt;
}

namespace {
constexpr std::array<const char*, 10> kEventNames{
    "RequestArrival", "Launch",         "ArrivePickup",   "ServiceComplete", "ArriveAXP",
    "PatientDropoff", "PatientPickup", "RefuelComplete", "ArriveFacility",  "Delivered"};
}

const char* to_string(EventKind k) { return kEventNames[static_cast<std::size_t>(k)]; }

std::optional<EventKind> event_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i) {
    if (s == kEventNames[i]) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

void validate(const RoutePlan& route, const std::string& path) {
  if (route.waypoints.empty()) throw ValidationError(path + ".waypoints", "at least one waypoint required");
  if (route.leg_speeds_mps.size() + 1 != route.waypoints.size()) {
    throw ValidationError(path + ".leg_speeds", "need exactly one speed per leg");
  }
  for (std::size_t i = 0; i < route.leg_speeds_mps.size(); ++i) {
    const double v = route.leg_speeds_mps[i];
    if (!std::isfinite(v) || v <= 0.0) {
      throw ValidationError(path + ".leg_speeds[" + std::to_string(i) + "]", "must be > 0");
    }
    if (route.waypoints[i] == route.waypoints[i + 1]) {
      throw ValidationError(path + ".waypoints[" + std::to_string(i + 1) + "]",
                            "consecutive waypoints must be distinct");
    }
  }
  if (!std::isfinite(route.departure_time_s)) {
    throw ValidationError(path + ".departure_time_s", "must be finite");
  }
}

void validate(const Watercraft& w, const std::string& path) {
  if (w.id.empty()) throw ValidationError(path + ".id", "must be non-empty");
  validate(w.route, path + ".route");
  for (std::size_t i = 1; i < w.override_track.size(); ++i) {
    if (!(w.override_track[i].t_s > w.override_track[i - 1].t_s)) {
      throw ValidationError(path + ".override_track[" + std::to_string(i) + "]",
                            "fix times must be strictly increasing");
    }
  }
}

void validate(const Aircraft& a, const std::string& path) {
  if (a.id.empty()) throw ValidationError(path + ".id", "must be non-empty");
  if (!std::isfinite(a.cruise_speed_mps) || a.cruise_speed_mps <= 0.0) {
    throw ValidationError(path + ".cruise_speed", "must be > 0");
  }
  if (a.max_range.meters() <= 0.0) throw ValidationError(path + ".max_range", "must be > 0");
  if (a.fuel_range_remaining > a.max_range) {
    throw ValidationError(path + ".fuel_range_remaining", "exceeds max_range");
  }
  if (!(a.service_time_hoist_s > 0.0)) throw ValidationError(path + ".service_time_hoist_s", "must be > 0");
  if (!(a.service_time_land_s > 0.0)) throw ValidationError(path + ".service_time_land_s", "must be > 0");
  if (a.cabin_size < 1) throw ValidationError(path + ".cabin_size", "must be >= 1");
}

namespace {

// Route legs with their durations, computed once per query batch.
class RouteTrack {
 public:
  explicit RouteTrack(const RoutePlan& route) : route_(route) {
    const auto& wp = route.waypoints;
    for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
      add(wp[i], wp[i + 1], route.leg_speeds_mps[i]);
    }
    if (route.loop && wp.size() > 1 && !(wp.back() == wp.front())) {
      add(wp.back(), wp.front(), route.leg_speeds_mps.back());
    }
  }

  GeoPoint at(double t_s) const {
    const auto& wp = route_.waypoints;
    if (wp.size() == 1 || t_s <= route_.departure_time_s) return wp.front();
    double elapsed = t_s - route_.departure_time_s;
    if (!route_.loop) {
      if (elapsed >= total_s_) return wp.back();
    } else if (total_s_ > 0.0) {
      elapsed = std::fmod(elapsed, total_s_);
    }
    for (const auto& l : legs_) {
      if (elapsed < l.duration_s) return intermediate_point(l.from, l.to, elapsed / l.duration_s);
      elapsed -= l.duration_s;
    }
    return route_.loop ? wp.front() : wp.back();
  }

 private:
  struct Leg {
    GeoPoint from, to;
    double duration_s;
  };

  void add(const GeoPoint& a, const GeoPoint& b, double speed) {
    legs_.push_back({a, b, gc_distance(a, b).meters() / speed});
    total_s_ += legs_.back().duration_s;
  }

  const RoutePlan& route_;
  std::vector<Leg> legs_;
  double total_s_ = 0.0;
};

GeoPoint track_position(const Watercraft& w, const RouteTrack& route, double t_s) {
  const auto& fixes = w.override_track;
  if (fixes.empty() || t_s < fixes.front().t_s) return route.at(t_s);

  if (t_s <= fixes.back().t_s) {
    auto hi = std::lower_bound(fixes.begin(), fixes.end(), t_s,
                               [](const PositionFix& f, double t) { return f.t_s < t; });
    if (hi->t_s == t_s || hi == fixes.begin()) return hi->position;
    auto lo = std::prev(hi);
    return intermediate_point(lo->position, hi->position, (t_s - lo->t_s) / (hi->t_s - lo->t_s));
  }

  // Past the newest fix: dead-reckon along the last observed course and speed.
  const PositionFix& last = fixes.back();
  if (fixes.size() < 2) return last.position;
  const PositionFix& prev = fixes[fixes.size() - 2];
  const double d = gc_distance(prev.position, last.position).meters();
  if (d <= 0.0) return last.position;
  const double speed = d / (last.t_s - prev.t_s);
  const double course = std::fmod(initial_bearing(last.position, prev.position) + 180.0, 360.0);
  return destination_point(last.position, course, LengthM(speed * (t_s - last.t_s)));
}

}  // namespace

GeoPoint watercraft_position(const Watercraft& w, double t_s) {
  return track_position(w, RouteTrack(w.route), t_s);
}

double watercraft_max_speed_mps(const Watercraft& w) {
  double v = 0.0;
  for (double s : w.route.leg_speeds_mps) v = std::max(v, s);
  const auto& fixes = w.override_track;
  for (std::size_t i = 1; i < fixes.size(); ++i) {
    v = std::max(v, gc_distance(fixes[i - 1].position, fixes[i].position).meters() /
                        (fixes[i].t_s - fixes[i - 1].t_s));
  }
  return v;
}

TransferMode transfer_mode(const Watercraft& w) { return w.helipad ? TransferMode::land : TransferMode::hoist; }

LengthM radius_of_action(LengthM max_range) { return LengthM(max_range.meters() / 2.0); }

bool colocated(const GeoPoint& a, const GeoPoint& b) { return gc_distance(a, b).meters() <= kColocationM; }

bool leg_feasible(LengthM fuel_remaining, const GeoPoint& from, const GeoPoint& to, bool refuel_at_to) {
  const double d = gc_distance(from, to).meters();
  const double usable = refuel_at_to ? fuel_remaining.meters() : fuel_remaining.meters() / 2.0;
  return d <= usable + kFeasibilityToleranceM;
}

bool leg_feasible(const Aircraft& ac, const GeoPoint& from, const GeoPoint& to, bool refuel_at_to) {
  return leg_feasible(ac.fuel_range_remaining, from, to, refuel_at_to);
}

std::optional<double> intercept_time(const GeoPoint& from, double depart_s, double speed_mps,
                                     const Watercraft& w, double max_flight_s) {
  const RouteTrack route(w.route);
  auto gap = [&](double t) {
    return speed_mps * (t - depart_s) - gc_distance(from, track_position(w, route, t)).meters();
  };
  double g_lo = gap(depart_s);
  if (g_lo >= 0.0) return depart_s;

  double lo = depart_s;
  double step = 60.0;
  double hi = depart_s + std::min(step, max_flight_s);
  double g_hi = gap(hi);
  while (g_hi < 0.0) {
    if (hi - depart_s >= max_flight_s) return std::nullopt;
    lo = hi;
    g_lo = g_hi;
    step *= 2.0;
    hi = depart_s + std::min(step, max_flight_s);
    g_hi = gap(hi);
  }
  // Illinois false position; `hi` always keeps gap >= 0 and `root_gap` is its
  // true residual (the interpolation weights get halved).
  double root_gap = g_hi;
  int side = 0;
  for (int i = 0; i < 100 && hi - lo > 1e-4 && root_gap > 1e-3; ++i) {
    const double t = hi - g_hi * (hi - lo) / (g_hi - g_lo);
    const double g = gap(t);
    if (g >= 0.0) {
      hi = t;
      g_hi = root_gap = g;
      if (side == 1) g_lo /= 2.0;
      side = 1;
    } else {
      lo = t;
      g_lo = g;
      if (side == -1) g_hi /= 2.0;
      side = -1;
    }
  }
  return hi;
}

// ---------------------------------------------------------------------------

const Aircraft* WorldState::find_aircraft(std::string_view id) const {
  for (const auto& a : aircraft) if (a.id == id) return &a;
  return nullptr;
}
Aircraft* WorldState::find_aircraft(std::string_view id) {
  for (auto& a : aircraft) if (a.id == id) return &a;
  return nullptr;
}
const Watercraft* WorldState::find_watercraft(std::string_view id) const {
  for (const auto& w : watercraft) if (w.id == id) return &w;
  return nullptr;
}
Watercraft* WorldState::find_watercraft(std::string_view id) {
  for (auto& w : watercraft) if (w.id == id) return &w;
  return nullptr;
}
const TreatmentFacility* WorldState::find_facility(std::string_view id) const {
  for (const auto& f : facilities) if (f.id == id) return &f;
  return nullptr;
}
const EvacRequest* WorldState::find_pending(std::string_view id) const {
  for (const auto& r : pending) if (r.id == id) return &r;
  return nullptr;
}

bool WorldState::knows_request(std::string_view id) const {
  auto has = [&](const auto& list, auto proj) {
    return std::any_of(list.begin(), list.end(), [&](const auto& x) { return proj(x) == id; });
  };
  return has(scheduled, [](const EvacRequest& r) { return std::string_view(r.id); }) ||
         has(pending, [](const EvacRequest& r) { return std::string_view(r.id); }) ||
         has(in_transit, [](const InTransit& r) { return std::string_view(r.request.id); }) ||
         has(delivered, [](const Delivery& d) { return std::string_view(d.request_id); });
}

GeoPoint aircraft_position(const WorldState& s, const Aircraft& ac) {
  if (ac.status == AircraftStatus::idle || ac.status == AircraftStatus::on_station) return ac.position;
  for (const auto& ev : s.agenda) {
    if (ev.aircraft != ac.id) continue;
    if (ev.leg_arrive <= ev.leg_depart || s.clock <= ev.leg_depart) return ac.position;
    const double f = static_cast<double>(s.clock - ev.leg_depart) /
                     static_cast<double>(ev.leg_arrive - ev.leg_depart);
    return intermediate_point(ac.position, ev.where, std::min(f, 1.0));
  }
  return ac.position;
}

}  // namespace medchain
