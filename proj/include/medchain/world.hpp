#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medchain/geo.hpp"

namespace medchain {

// Simulation time is integer milliseconds so event ordering is bit-identical
// across platforms. Geometry works in double seconds and is rounded up into ms.
using TimeMs = std::int64_t;

inline TimeMs ceil_ms(double seconds) {
  return static_cast<TimeMs>(std::ceil(seconds * 1000.0 - 1e-6));
}
inline double to_seconds(TimeMs t) { return static_cast<double>(t) / 1000.0; }

enum class Precedence { urgent, priority, routine };
enum class AircraftStatus { idle, enroute, on_station, returning };
enum class MedLevel { none, medic, role2 };
enum class TransferMode { land, hoist };

const char* to_string(Precedence p);
const char* to_string(AircraftStatus s);
const char* to_string(MedLevel m);
const char* to_string(TransferMode m);
std::optional<Precedence> precedence_from_string(std::string_view s);
std::optional<MedLevel> med_level_from_string(std::string_view s);

struct RoutePlan {
  std::vector<GeoPoint> waypoints;
  std::vector<double> leg_speeds_mps;  // one per leg, waypoints.size() - 1 entries
  double departure_time_s = 0.0;
  // A looping route returns from the last waypoint to the first at the last
  // leg's speed and repeats.
  bool loop = false;
};

struct PositionFix {
  double t_s = 0.0;
  GeoPoint position;
};

struct Watercraft {
  std::string id;
  RoutePlan route;
  bool helipad = false;
  bool refuel = false;
  MedLevel med_level = MedLevel::none;
  // Live fixes supersede the declared route. Strictly increasing in time.
  std::vector<PositionFix> override_track;
};

struct Aircraft {
  std::string id;
  GeoPoint home_base;
  double cruise_speed_mps = 0.0;
  LengthM max_range;
  AircraftStatus status = AircraftStatus::idle;
  LengthM fuel_range_remaining;
  double service_time_hoist_s = 300.0;
  double service_time_land_s = 180.0;
  int cabin_size = 2;
  // False for aircraft tasked only with point-of-injury pickup (they hand off
  // at an AXP and never fly to a treatment facility).
  bool can_deliver = true;
  // False for aircraft that only collect patients from an AXP.
  bool can_pickup = true;

  // Dynamic state carried in world snapshots.
  bool tasked = false;
  GeoPoint position;
};

struct TreatmentFacility {
  std::string id;
  GeoPoint location;
  int role = 2;
};

struct EvacRequest {
  std::string id;
  double time_s = 0.0;
  GeoPoint location;
  Precedence precedence = Precedence::priority;
  int patient_count = 1;
  std::string destination;
};

// Validation of individual entities; throws ValidationError with `path` as prefix.
void validate(const RoutePlan& route, const std::string& path);
void validate(const Watercraft& w, const std::string& path);
void validate(const Aircraft& a, const std::string& path);

GeoPoint watercraft_position(const Watercraft& w, double t_s);
double watercraft_max_speed_mps(const Watercraft& w);
TransferMode transfer_mode(const Watercraft& w);

LengthM radius_of_action(LengthM max_range);

inline constexpr double kFeasibilityToleranceM = 1e-3;
inline constexpr double kColocationM = 100.0;

bool colocated(const GeoPoint& a, const GeoPoint& b);

// Without refuel at the far end the aircraft must keep enough range to fly the
// same distance back, so only half the remaining range is usable.
bool leg_feasible(LengthM fuel_remaining, const GeoPoint& from, const GeoPoint& to, bool refuel_at_to);
bool leg_feasible(const Aircraft& ac, const GeoPoint& from, const GeoPoint& to, bool refuel_at_to);

// Earliest arrival time (s) of an aircraft leaving `from` at `depart_s` that
// meets watercraft `w`, or nullopt if no meeting within `max_flight_s`.
std::optional<double> intercept_time(const GeoPoint& from, double depart_s, double speed_mps,
                                     const Watercraft& w, double max_flight_s);

// ---------------------------------------------------------------------------
// World snapshots

enum class EventKind {
  RequestArrival,
  Launch,
  ArrivePickup,
  ServiceComplete,
  ArriveAXP,
  PatientDropoff,
  PatientPickup,
  RefuelComplete,
  ArriveFacility,
  Delivered,
};

const char* to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view s);

// A committed future event on an aircraft's mission.
struct ScheduledEvent {
  TimeMs time = 0;
  EventKind kind = EventKind::Launch;
  std::string aircraft;
  std::string request;
  std::string watercraft;
  std::string facility;
  // Where the aircraft is when the event fires, and when it left its previous
  // position (for in-flight interpolation).
  GeoPoint where;
  TimeMs leg_depart = 0;
  TimeMs leg_arrive = 0;
  double fuel_burn_m = 0.0;
  bool refuel_here = false;
  // ServiceComplete that loads the patient at the point of injury.
  bool loads_patient = false;
};

enum class TransitLeg { awaiting_pickup, aboard, at_axp };
const char* to_string(TransitLeg leg);

struct InTransit {
  EvacRequest request;
  std::string carrier;  // aircraft or watercraft id; empty while awaiting pickup
  TransitLeg leg = TransitLeg::awaiting_pickup;
};

struct Delivery {
  std::string request_id;
  TimeMs time = 0;
};

struct ServiceConfig {
  double refuel_s = 600.0;
  bool stochastic = false;
  double noise_spread = 0.2;  // triangular noise of +-20% around the mean
  std::array<double, 3> precedence_weights{4.0, 2.0, 1.0};
  double launch_grid_s = 10.0;
  double max_intercept_s = 6.0 * 3600.0;
  // Undelivered time charged per stranded patient when an episode stalls.
  double stall_penalty_s = 86400.0;

  double weight(Precedence p) const { return precedence_weights[static_cast<std::size_t>(p)]; }
};

struct WorldState {
  TimeMs clock = 0;
  std::vector<Aircraft> aircraft;
  std::vector<Watercraft> watercraft;
  std::vector<TreatmentFacility> facilities;
  std::vector<EvacRequest> scheduled;  // scripted arrivals not yet due, by (time, id)
  std::vector<EvacRequest> pending;    // arrived, not yet dispatched
  std::vector<InTransit> in_transit;
  std::vector<Delivery> delivered;
  std::vector<ScheduledEvent> agenda;  // sorted by event order
  ServiceConfig config;
  bool stalled = false;

  const Aircraft* find_aircraft(std::string_view id) const;
  Aircraft* find_aircraft(std::string_view id);
  const Watercraft* find_watercraft(std::string_view id) const;
  Watercraft* find_watercraft(std::string_view id);
  const TreatmentFacility* find_facility(std::string_view id) const;
  const EvacRequest* find_pending(std::string_view id) const;
  bool knows_request(std::string_view id) const;
};

// Current position of an aircraft, interpolated along its in-progress leg.
GeoPoint aircraft_position(const WorldState& s, const Aircraft& ac);

}  // namespace medchain
