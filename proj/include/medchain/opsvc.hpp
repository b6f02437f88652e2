#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "medchain/planner.hpp"
#include "medchain/scenario.hpp"
#include "medchain/smdp.hpp"

namespace medchain {

struct SessionSnapshot {
  std::uint64_t revision = 0;
  WorldState state;
};

// One broadcast per applied mutation. `payload` is a JSON document that
// already carries the revision.
struct Broadcast {
  std::uint64_t revision = 0;
  std::string payload;
};

struct WhatIfResult {
  DispatchAction action;
  std::vector<TimelineEntry> timeline;
  double total_time_s = 0.0;  // predicted delivery minus request time
};

// In-memory operations session. Reads work on immutable snapshots; mutations
// are serialized and each bumps the revision by exactly one.
class Session {
 public:
  explicit Session(Scenario sc);

  std::shared_ptr<const SessionSnapshot> snapshot() const;
  const Scenario& scenario() const { return scenario_; }

  std::uint64_t submit_request(EvacRequest req);
  std::uint64_t commit(const DispatchAction& a);
  std::uint64_t ingest_position(const std::string& entity_id, double t_s, const GeoPoint& p);
  // Advances the session clock to `t_s` (never backwards).
  std::uint64_t tick(double t_s);

  Recommendation recommend(const std::string& request_id, PlannerConfig cfg) const;
  WhatIfResult whatif(const std::string& request_id, const std::optional<std::string>& forced_axp,
                      const std::optional<std::string>& forced_aircraft, const PlannerConfig& cfg) const;

  using Subscriber = std::function<void(const Broadcast&)>;
  int subscribe(Subscriber fn);
  void unsubscribe(int token);

 private:
  std::uint64_t publish(WorldState next, const std::string& type, const std::string& detail_json,
                        const std::vector<Event>& events);

  Scenario scenario_;
  mutable std::shared_mutex snap_mu_;
  std::shared_ptr<const SessionSnapshot> snap_;
  std::mutex writer_mu_;  // serializes mutations and broadcast order
  std::mutex subs_mu_;
  std::map<int, Subscriber> subs_;
  int next_token_ = 1;
  std::map<std::string, double> last_fix_;
  RandomStream rng_{0};
};

}  // namespace medchain
