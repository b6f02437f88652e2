#pragma once

#include <optional>
#include <string>
#include <vector>

#include "medchain/world.hpp"

namespace medchain {

struct Disk {
  GeoPoint center;
  LengthM radius;
};

// Intersection of spherical disks. Membership is exact (per-disk distance tests).
class ZoneRegion {
 public:
  explicit ZoneRegion(std::vector<Disk> disks);

  bool contains(const GeoPoint& p) const;
  // True when some pair of disks cannot overlap (centers farther apart than the radii sum).
  bool empty() const { return empty_; }
  const std::vector<Disk>& disks() const { return disks_; }

 private:
  std::vector<Disk> disks_;
  bool empty_ = false;
};

ZoneRegion opportunity_zone(const GeoPoint& origin_a, LengthM roa_a, const GeoPoint& origin_b, LengthM roa_b);

struct TimeWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<std::string> watercraft_ids;  // sorted; empty for blackouts
};

// Samples every dt from t0; sample k stands for [t0 + k dt, min(t0 + (k+1) dt, t1)).
std::vector<TimeWindow> zone_windows(const ZoneRegion& z, const std::vector<Watercraft>& fleet, double t0,
                                     double t1, double dt);
// Complement of `windows` within [t0, t1].
std::vector<TimeWindow> blackouts(const std::vector<TimeWindow>& windows, double t0, double t1);

// ---------------------------------------------------------------------------
// Evacuation chains

enum class ExchangeMode { land, hoist, ground };
const char* to_string(ExchangeMode m);

struct PlanEndpoint {
  std::string entity;  // "pickup", "dest", "home:<aircraft>", or a watercraft id
  GeoPoint point;      // position at the leg's depart (from) or arrive (to) time
};

struct TransferLeg {
  std::string aircraft_id;
  PlanEndpoint from;
  PlanEndpoint to;
  double depart_s = 0.0;
  double arrive_s = 0.0;
  bool refuel = false;  // refuels on arrival
  ExchangeMode exchange_mode = ExchangeMode::ground;
  bool carrying_patient = false;
};

struct TransferPlan {
  std::vector<TransferLeg> legs;
  double total_time_s = 0.0;
  LengthM total_distance;  // all legs, including positioning flights

  // Watercraft where the patient changes aircraft.
  std::vector<std::string> axp_watercraft() const;
};

struct ChainConfig {
  double t0_s = 0.0;
  double horizon_s = 48.0 * 3600.0;
  double dt_s = 300.0;
  double refuel_s = 600.0;
  double max_intercept_s = 12.0 * 3600.0;
};

// Earliest-arrival evacuation chain from pickup to dest. Throws NoFeasibleChain.
TransferPlan chain_search(const GeoPoint& pickup, const GeoPoint& dest, const std::vector<Watercraft>& fleet,
                          const std::vector<Aircraft>& aircraft_pool, const ChainConfig& cfg);

// Machine check of a plan's leg invariants; returns the first violation.
std::optional<std::string> check_plan(const TransferPlan& plan, const GeoPoint& pickup, const GeoPoint& dest,
                                      const std::vector<Watercraft>& fleet,
                                      const std::vector<Aircraft>& aircraft_pool, const ChainConfig& cfg);

// ---------------------------------------------------------------------------
// Dedicated AXP placement

struct DemandPair {
  GeoPoint pickup;
  GeoPoint dest;
};

struct PlacementConfig {
  double t0_s = 0.0;
  double horizon_s = 24.0 * 3600.0;  // demand instants span [t0, t0 + horizon)
  double dt_s = 3600.0;              // spacing of demand instants
  ChainConfig chain;                 // t0 is overridden per instant
};

struct Placement {
  std::size_t index = 0;
  GeoPoint location;
  double coverage = 0.0;
  std::vector<double> scores;  // per candidate
};

inline constexpr const char* kDedicatedAxpId = "dedicated_axp";

Placement place_dedicated_axp(const std::vector<GeoPoint>& candidates, const std::vector<DemandPair>& demand,
                              const std::vector<Watercraft>& fleet, const std::vector<Aircraft>& aircraft_pool,
                              const PlacementConfig& cfg);

// ---------------------------------------------------------------------------
// GeoJSON

inline constexpr int kBoundaryPoints = 128;

std::string zone_geojson(const ZoneRegion& z, const std::vector<TimeWindow>& windows,
                         const std::vector<TimeWindow>& blackout_set);
std::string plan_geojson(const TransferPlan& plan);

}  // namespace medchain
