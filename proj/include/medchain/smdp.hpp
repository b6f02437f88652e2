#pragma once

// Event-driven semi-Markov decision process over world snapshots.
//
// Decision epochs are the instants at which a dispatch is possible: after a
// dispatch the epoch stays open (zero sojourn) while further dispatches remain
// legal; otherwise time advances through mission events and request arrivals
// until a dispatch becomes possible or the episode ends. The reward over a
// sojourn is minus the precedence-weighted patient-seconds spent undelivered.

#include <optional>
#include <string>
#include <vector>

#include "medchain/random.hpp"
#include "medchain/world.hpp"

namespace medchain {

enum class ActionKind { dispatch_direct, dispatch_via_axp, hold };
const char* to_string(ActionKind k);
std::optional<ActionKind> action_kind_from_string(std::string_view s);

struct DispatchAction {
  ActionKind kind = ActionKind::hold;
  std::string aircraft_id;  // pickup aircraft
  std::string request_id;
  std::optional<std::string> axp_watercraft_id;
  std::optional<std::string> receiving_aircraft_id;
  // Pickup aircraft launch. For via-AXP actions the receiving aircraft launches
  // at receiver_launch_time, chosen so it arrives just after the drop-off.
  TimeMs launch_time = 0;
  std::optional<TimeMs> receiver_launch_time;

  static DispatchAction hold() { return {}; }
  friend bool operator==(const DispatchAction&, const DispatchAction&) = default;
};

// Deterministic order: (kind, aircraft, request, watercraft, receiver).
bool action_less(const DispatchAction& a, const DispatchAction& b);
std::string describe(const DispatchAction& a);

struct Event {
  TimeMs t = 0;
  EventKind kind = EventKind::RequestArrival;
  std::string aircraft;
  std::string request;
  std::string watercraft;
  std::string facility;
  friend bool operator==(const Event&, const Event&) = default;
};

// Log order: time, then kind, then ids.
bool event_less(const Event& a, const Event& b);

struct Transition {
  WorldState next_state;
  TimeMs sojourn = 0;
  double reward = 0.0;  // always <= 0
  bool terminal = false;
  std::vector<Event> events;
};

// A legal dispatch together with its deterministic mission timeline.
struct DispatchOption {
  DispatchAction action;
  TimeMs predicted_delivery = 0;
  std::vector<ScheduledEvent> mission;
};

WorldState make_initial_state(std::vector<Aircraft> aircraft, std::vector<Watercraft> watercraft,
                              std::vector<TreatmentFacility> facilities, std::vector<EvacRequest> requests,
                              ServiceConfig config);

std::vector<DispatchAction> legal_actions(const WorldState& s);
std::vector<DispatchOption> dispatch_options(const WorldState& s);
std::vector<DispatchOption> dispatch_options(const WorldState& s, std::string_view request_id);
bool has_dispatch_option(const WorldState& s);

// Deterministic evaluation of one candidate; nullopt if it is not legal in s.
std::optional<DispatchOption> evaluate_action(const WorldState& s, const DispatchAction& a);

Transition step(const WorldState& s, const DispatchAction& a, RandomStream& rng);

// Applies a dispatch without advancing the clock (operator-paced sessions).
Transition commit_dispatch(const WorldState& s, const DispatchAction& a, RandomStream& rng);

// Processes everything due at s.clock and advances to the first decision epoch.
Transition begin_episode(const WorldState& s);

// Advances the clock to t without taking decisions (operator tick, plan --at).
Transition advance_to(const WorldState& s, TimeMs t);

bool is_terminal(const WorldState& s);
// Terminal or stalled (pending patients nothing can ever serve).
bool episode_over(const WorldState& s);

double undelivered_weight(const WorldState& s);
std::optional<TimeMs> next_event_time(const WorldState& s);

}  // namespace medchain
