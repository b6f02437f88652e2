#pragma once

// JSON documents shared by the C API, the HTTP service and the CLI.

#include <string>

#include "json.hpp"

#include "medchain/opsvc.hpp"
#include "medchain/planner.hpp"
#include "medchain/simkit.hpp"
#include "medchain/smdp.hpp"
#include "medchain/zones.hpp"

namespace medchain::json_io {

using Json = nlohmann::ordered_json;

Json point(const GeoPoint& p);
GeoPoint point_from(const nlohmann::json& j, const std::string& path);

Json action(const DispatchAction& a);
DispatchAction action_from(const nlohmann::json& j);

Json event(const Event& e);
Json timeline(const std::vector<TimelineEntry>& entries);
Json recommendation(const Recommendation& r);
Json whatif(const WhatIfResult& w);
Json state(const WorldState& s, std::uint64_t revision);
Json metrics(const Metrics& m);
Json summary(const MetricsSummary& s);
Json plan(const TransferPlan& p);

EvacRequest request_from(const nlohmann::json& j, double default_time_s);
PlannerConfig planner_config_from(const nlohmann::json& j, PlannerConfig base = {});

}  // namespace medchain::json_io
