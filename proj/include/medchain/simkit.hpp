#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "medchain/planner.hpp"
#include "medchain/scenario.hpp"
#include "medchain/smdp.hpp"

namespace medchain {

// Queried at every decision epoch. The seed is derived from the run seed and
// the epoch index, so a policy that plans with it stays reproducible.
using Policy = std::function<DispatchAction(const WorldState&, std::uint64_t epoch_seed)>;

Policy greedy_policy_fn();
Policy mcts_policy_fn(PlannerConfig cfg);

struct RequestMetrics {
  std::string request_id;
  std::optional<double> response_time_s;
  std::optional<double> time_to_facility_s;
  std::vector<double> axp_dwell_s;
};

struct Metrics {
  std::vector<RequestMetrics> requests;         // by request id
  std::map<std::string, double> utilization;    // aircraft id -> busy fraction
};

struct RunResult {
  std::vector<Event> log;
  Metrics metrics;
  WorldState final_state;
  double total_return = 0.0;
};

RunResult run(const Scenario& sc, const Policy& policy, std::uint64_t seed);

// Everything here is derived from the log; `aircraft_ids` lists aircraft that
// never flew so they still report zero utilization.
Metrics compute_metrics(const std::vector<Event>& log, const std::vector<std::string>& aircraft_ids = {});

std::string event_to_json(const Event& e);
std::string to_jsonl(const std::vector<Event>& log);
std::vector<Event> parse_jsonl(std::string_view text);

struct ReplayReport {
  bool ok = true;
  std::string violation;  // first violated invariant, empty when ok
};

ReplayReport replay_check(const std::vector<Event>& log, const Scenario& sc);

struct Stat {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
};

Stat summarize(std::vector<double> values);

struct MetricsSummary {
  int episodes = 0;
  Stat response_time;
  Stat time_to_facility;
  Stat axp_dwell;
  Stat utilization;
};

MetricsSummary evaluate_policy(const Scenario& sc, const Policy& policy, int episodes, std::uint64_t seed);

}  // namespace medchain
