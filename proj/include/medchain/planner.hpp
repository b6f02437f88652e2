#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "medchain/smdp.hpp"

namespace medchain {

struct PlannerConfig {
  int iterations = 1000;
  double exploration_c = 1.4;
  int max_rollout_depth = 30;
  std::uint64_t seed = 0;
  bool stochastic = false;
  // Root parallelism. Results are reproducible for a fixed worker count.
  int workers = 1;
  // Restricts root dispatches to this request (hold stays available).
  std::optional<std::string> focus_request;
};

struct VisitCount {
  DispatchAction action;
  int count = 0;
  double mean_return = 0.0;
};

struct TimelineEntry {
  EventKind kind = EventKind::Launch;
  TimeMs t = 0;
  std::string aircraft;
  std::string request;
  std::string watercraft;
  std::string facility;
};

struct Recommendation {
  DispatchAction action;
  double estimated_return = 0.0;
  std::vector<VisitCount> visit_counts;  // in legal_actions order
  std::vector<TimelineEntry> predicted_timeline;
};

void validate(const PlannerConfig& cfg);

Recommendation plan(const WorldState& s, const PlannerConfig& cfg);

// Highest-precedence, oldest request first; among its options the earliest
// predicted delivery, ties by aircraft, watercraft, then receiver id.
DispatchAction greedy_policy(const WorldState& s);

std::vector<TimelineEntry> timeline_of(const DispatchOption& opt);

}  // namespace medchain
