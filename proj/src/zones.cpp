#include "medchain/zones.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "json.hpp"

#include "medchain/errors.hpp"

namespace medchain {

ZoneRegion::ZoneRegion(std::vector<Disk> disks) : disks_(std::move(disks)) {
  if (disks_.empty()) throw ValidationError("disks", "a zone needs at least one disk");
  for (std::size_t i = 0; i < disks_.size(); ++i) {
    if (!(disks_[i].radius.meters() > 0.0)) {
      throw ValidationError("disks[" + std::to_string(i) + "].radius", "must be > 0");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const double sep = gc_distance(disks_[i].center, disks_[j].center).meters();
      if (sep > disks_[i].radius.meters() + disks_[j].radius.meters()) empty_ = true;
    }
  }
}

bool ZoneRegion::contains(const GeoPoint& p) const {
  return std::all_of(disks_.begin(), disks_.end(),
                     [&](const Disk& d) { return gc_distance(d.center, p) <= d.radius; });
}

ZoneRegion opportunity_zone(const GeoPoint& origin_a, LengthM roa_a, const GeoPoint& origin_b, LengthM roa_b) {
  return ZoneRegion({{origin_a, roa_a}, {origin_b, roa_b}});
}

std::vector<TimeWindow> zone_windows(const ZoneRegion& z, const std::vector<Watercraft>& fleet, double t0,
                                     double t1, double dt) {
  if (!(t1 > t0)) throw ValidationError("horizon", "t1 must be greater than t0");
  if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
  std::vector<TimeWindow> out;
  if (z.empty()) return out;
  std::optional<TimeWindow> open;
  std::set<std::string> inside_ids;
  for (std::int64_t k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    if (t >= t1) break;
    const double end = std::min(t + dt, t1);
    std::vector<std::string> inside;
    for (const auto& w : fleet) {
      if (z.contains(watercraft_position(w, t))) inside.push_back(w.id);
    }
    if (!inside.empty()) {
      if (!open) {
        open = TimeWindow{t, end, {}};
        inside_ids.clear();
      }
      open->end_s = end;
      inside_ids.insert(inside.begin(), inside.end());
    } else if (open) {
      open->watercraft_ids.assign(inside_ids.begin(), inside_ids.end());
      out.push_back(std::move(*open));
      open.reset();
    }
  }
  if (open) {
    open->watercraft_ids.assign(inside_ids.begin(), inside_ids.end());
    out.push_back(std::move(*open));
  }
  return out;
}

std::vector<TimeWindow> blackouts(const std::vector<TimeWindow>& windows, double t0, double t1) {
  std::vector<TimeWindow> out;
  double cursor = t0;
  for (const auto& w : windows) {
    if (w.start_s > cursor) out.push_back({cursor, w.start_s, {}});
    cursor = std::max(cursor, w.end_s);
  }
  if (cursor < t1) out.push_back({cursor, t1, {}});
  return out;
}

const char* to_string(ExchangeMode m) {
  switch (m) {
    case ExchangeMode::land: return "land";
    case ExchangeMode::hoist: return "hoist";
    case ExchangeMode::ground: return "ground";
  }
  return "?";
}

std::vector<std::string> TransferPlan::axp_watercraft() const {
  std::vector<std::string> out;
  const TransferLeg* prev = nullptr;
  for (const auto& leg : legs) {
    if (!leg.carrying_patient) continue;
    if (prev && prev->aircraft_id != leg.aircraft_id) out.push_back(prev->to.entity);
    prev = &leg;
  }
  return out;
}

namespace {

enum class Phase { ground, at_axp, aboard, delivered };

struct Label {
  Phase phase = Phase::ground;
  int node = 0;
  int carrier = -1;
  std::uint64_t used = 0;
  double fuel = 0.0;
  TimeMs t = 0;
  int parent = -1;
  std::vector<TransferLeg> legs;
  int nlegs = 0;
  std::string sig;
};

class ChainSearch {
 public:
  ChainSearch(const GeoPoint& pickup, const GeoPoint& dest, const std::vector<Watercraft>& fleet,
              const std::vector<Aircraft>& pool, const ChainConfig& cfg)
      : pickup_(pickup), dest_(dest), fleet_(fleet), pool_(pool), cfg_(cfg) {
    t0_ = ceil_ms(cfg.t0_s);
    dt_ = std::max<TimeMs>(1, ceil_ms(cfg.dt_s));
    t_end_ = t0_ + ceil_ms(cfg.horizon_s);
  }

  TransferPlan solve() {
    Label start;
    start.phase = Phase::ground;
    start.node = kPickup;
    start.t = t0_;
    push(std::move(start));
    while (!queue_.empty()) {
      const int idx = std::get<3>(queue_.top());
      queue_.pop();
      if (labels_[idx].phase == Phase::delivered) return build(idx);
      expand(idx);
    }
    throw NoFeasibleChain("no evacuation chain reaches the destination within the horizon");
  }

 private:
  static constexpr int kPickup = 0;
  static constexpr int kDest = 1;
  int wc_node(std::size_t w) const { return 2 + static_cast<int>(w); }
  int home_node(std::size_t a) const { return 2 + static_cast<int>(fleet_.size() + a); }
  bool is_wc(int node) const { return node >= 2 && node < wc_node(fleet_.size()); }
  const Watercraft& wc(int node) const { return fleet_[static_cast<std::size_t>(node - 2)]; }

  std::string entity(int node) const {
    if (node == kPickup) return "pickup";
    if (node == kDest) return "dest";
    if (is_wc(node)) return wc(node).id;
    return "home:" + pool_[static_cast<std::size_t>(node - home_node(0))].id;
  }

  GeoPoint pos(int node, TimeMs t) const {
    if (node == kPickup) return pickup_;
    if (node == kDest) return dest_;
    if (is_wc(node)) return watercraft_position(wc(node), to_seconds(t));
    return pool_[static_cast<std::size_t>(node - home_node(0))].home_base;
  }

  TimeMs quantize(TimeMs t) const {
    if (t <= t0_) return t0_;
    return t0_ + ((t - t0_ + dt_ - 1) / dt_) * dt_;
  }

  // Earliest time an aircraft leaving `from` at `depart` can be at `node`.
  std::optional<TimeMs> reach(const Aircraft& ac, const GeoPoint& from, TimeMs depart, int node) const {
    if (!is_wc(node)) return depart + ceil_ms(gc_distance(from, pos(node, depart)).meters() / ac.cruise_speed_mps);
    auto t = intercept_time(from, to_seconds(depart), ac.cruise_speed_mps, wc(node), cfg_.max_intercept_s);
    if (!t) return std::nullopt;
    return std::max(depart, ceil_ms(*t));
  }

  static double service_s(const Aircraft& ac, ExchangeMode mode) {
    return mode == ExchangeMode::hoist ? ac.service_time_hoist_s : ac.service_time_land_s;
  }

  ExchangeMode mode_at(int node) const {
    if (!is_wc(node)) return ExchangeMode::ground;
    return transfer_mode(wc(node)) == TransferMode::hoist ? ExchangeMode::hoist : ExchangeMode::land;
  }

  bool dominated(const Label& l) const {
    auto it = frontier_.find(key(l));
    if (it == frontier_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(), [&](const std::pair<TimeMs, double>& o) {
      return o.first <= l.t && o.second >= l.fuel - 1e-6;
    });
  }

  std::tuple<int, int, int, std::uint64_t> key(const Label& l) const {
    return {static_cast<int>(l.phase), l.node, l.carrier, l.used};
  }

  void push(Label l) {
    if (l.t > t_end_ || dominated(l)) return;
    frontier_[key(l)].emplace_back(l.t, l.fuel);
    if (l.parent >= 0) {
      const Label& p = labels_[static_cast<std::size_t>(l.parent)];
      l.nlegs = p.nlegs + static_cast<int>(l.legs.size());
      l.sig = p.sig;
    }
    for (const auto& leg : l.legs) l.sig += leg.aircraft_id + ">" + leg.to.entity + "|";
    labels_.push_back(std::move(l));
    const Label& added = labels_.back();
    const int idx = static_cast<int>(labels_.size() - 1);
    queue_.emplace(added.t, added.nlegs, added.sig, idx);
  }

  TransferLeg make_leg(const Aircraft& ac, int from_node, const GeoPoint& from, TimeMs depart, int to_node,
                       const GeoPoint& to, TimeMs arrive, bool refuel, bool carrying) const {
    TransferLeg leg;
    leg.aircraft_id = ac.id;
    leg.from = {entity(from_node), from};
    leg.to = {entity(to_node), to};
    leg.depart_s = to_seconds(depart);
    leg.arrive_s = to_seconds(arrive);
    leg.refuel = refuel;
    leg.exchange_mode = mode_at(to_node);
    leg.carrying_patient = carrying;
    return leg;
  }

  void expand(int idx) {
    const Label cur = labels_[static_cast<std::size_t>(idx)];
    if (cur.phase == Phase::ground || cur.phase == Phase::at_axp) {
      for (std::size_t a = 0; a < pool_.size(); ++a) {
        if (cur.used & (std::uint64_t{1} << a)) continue;
        position(cur, idx, a);
      }
      return;
    }
    const Aircraft& ac = pool_[static_cast<std::size_t>(cur.carrier)];
    const GeoPoint here = pos(cur.node, cur.t);
    const int home = home_node(static_cast<std::size_t>(cur.carrier));

    // Deliver.
    {
      const TimeMs arr = quantize(*reach(ac, here, cur.t, kDest));
      const bool refuel_at = colocated(dest_, ac.home_base);
      if (leg_feasible(LengthM(cur.fuel), here, dest_, refuel_at)) {
        const double d = gc_distance(here, dest_).meters();
        const double left = cur.fuel - d;
        if (refuel_at || gc_distance(dest_, ac.home_base).meters() <= left + kFeasibilityToleranceM) {
          Label next = cur;
          next.phase = Phase::delivered;
          next.node = kDest;
          next.t = arr;
          next.fuel = refuel_at ? ac.max_range.meters() : left;
          next.parent = idx;
          next.legs = {make_leg(ac, cur.node, here, cur.t, kDest, dest_, arr, refuel_at, true)};
          push(std::move(next));
        }
      }
    }
    // Refuel at home.
    if (cur.node != home && leg_feasible(LengthM(cur.fuel), here, ac.home_base, true)) {
      const TimeMs arr = quantize(*reach(ac, here, cur.t, home));
      Label next = cur;
      next.node = home;
      next.t = arr + ceil_ms(cfg_.refuel_s);
      next.fuel = ac.max_range.meters();
      next.parent = idx;
      next.legs = {make_leg(ac, cur.node, here, cur.t, home, ac.home_base, arr, true, true)};
      push(std::move(next));
    }
    // Watercraft: refuel stop or hand-off.
    for (std::size_t w = 0; w < fleet_.size(); ++w) {
      const int node = wc_node(w);
      if (node == cur.node) continue;
      auto exact = reach(ac, here, cur.t, node);
      if (!exact) continue;
      const TimeMs arr = quantize(*exact);
      const GeoPoint there = pos(node, arr);
      const Watercraft& ship = fleet_[w];
      if (!leg_feasible(LengthM(cur.fuel), here, there, ship.refuel)) continue;
      const double d = gc_distance(here, there).meters();
      if (ship.refuel) {
        Label next = cur;
        next.node = node;
        next.t = arr + ceil_ms(cfg_.refuel_s);
        next.fuel = ac.max_range.meters();
        next.parent = idx;
        next.legs = {make_leg(ac, cur.node, here, cur.t, node, there, arr, true, true)};
        push(std::move(next));
      }
      const ExchangeMode mode = mode_at(node);
      const double svc = service_s(ac, mode);
      const double left = cur.fuel - d - (mode == ExchangeMode::hoist ? svc * ac.cruise_speed_mps : 0.0);
      if (left < 0.0) continue;
      const TimeMs dropped = arr + ceil_ms(svc);
      if (!ship.refuel &&
          gc_distance(pos(node, dropped), ac.home_base).meters() > left + kFeasibilityToleranceM) {
        continue;
      }
      Label next = cur;
      next.phase = Phase::at_axp;
      next.node = node;
      next.carrier = -1;
      next.t = dropped;
      next.fuel = 0.0;
      next.parent = idx;
      next.legs = {make_leg(ac, cur.node, here, cur.t, node, there, arr, false, true)};
      push(std::move(next));
    }
  }

  // An unused aircraft flies from home to the patient and loads them.
  void position(const Label& cur, int idx, std::size_t a) {
    const Aircraft& ac = pool_[a];
    auto exact = reach(ac, ac.home_base, t0_, cur.node);
    if (!exact) return;
    const TimeMs arr = quantize(std::max(*exact, cur.t));
    const GeoPoint there = pos(cur.node, arr);
    const bool refuel_at = is_wc(cur.node) && wc(cur.node).refuel;
    const double fuel = ac.fuel_range_remaining.meters();
    // A sortie from home keeps its abort reserve even when the first stop could
    // refuel it, so aircraft only meet patients inside their radius of action.
    if (!leg_feasible(LengthM(fuel), ac.home_base, there, false)) return;
    const double d = gc_distance(ac.home_base, there).meters();
    const ExchangeMode mode = mode_at(cur.node);
    const double svc = service_s(ac, mode == ExchangeMode::ground ? ExchangeMode::land : mode);
    const double hover = mode == ExchangeMode::hoist ? svc * ac.cruise_speed_mps : 0.0;
    const double left = (refuel_at ? ac.max_range.meters() : fuel - d) - hover;
    if (left < 0.0) return;
    const TimeMs depart = std::max(t0_, arr - ceil_ms(d / ac.cruise_speed_mps));

    Label next;
    next.phase = Phase::aboard;
    next.node = cur.node;
    next.carrier = static_cast<int>(a);
    next.used = cur.used | (std::uint64_t{1} << a);
    next.fuel = left;
    next.t = arr + ceil_ms(svc);
    next.parent = idx;
    next.legs = {make_leg(ac, home_node(a), ac.home_base, depart, cur.node, there, arr, refuel_at, false)};
    push(std::move(next));
  }

  TransferPlan build(int idx) const {
    std::vector<const Label*> chain;
    for (int i = idx; i >= 0; i = labels_[static_cast<std::size_t>(i)].parent) {
      chain.push_back(&labels_[static_cast<std::size_t>(i)]);
    }
    TransferPlan plan;
    double dist = 0.0;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      for (const auto& leg : (*it)->legs) {
        dist += gc_distance(leg.from.point, leg.to.point).meters();
        plan.legs.push_back(leg);
      }
    }
    plan.total_time_s = to_seconds(labels_[static_cast<std::size_t>(idx)].t) - cfg_.t0_s;
    plan.total_distance = LengthM(dist);
    return plan;
  }

  GeoPoint pickup_, dest_;
  const std::vector<Watercraft>& fleet_;
  const std::vector<Aircraft>& pool_;
  ChainConfig cfg_;
  TimeMs t0_ = 0, dt_ = 1, t_end_ = 0;
  std::vector<Label> labels_;
  std::map<std::tuple<int, int, int, std::uint64_t>, std::vector<std::pair<TimeMs, double>>> frontier_;
  using Entry = std::tuple<TimeMs, int, std::string, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
};

void check_chain_config(const ChainConfig& cfg, const std::vector<Aircraft>& pool) {
  if (!(cfg.dt_s > 0.0)) throw ValidationError("dt", "must be > 0");
  if (!(cfg.horizon_s > 0.0)) throw ValidationError("horizon", "must be > 0");
  if (pool.empty()) throw ValidationError("aircraft", "the aircraft pool must not be empty");
  if (pool.size() > 64) throw ValidationError("aircraft", "at most 64 aircraft are supported");
}

}  // namespace

TransferPlan chain_search(const GeoPoint& pickup, const GeoPoint& dest, const std::vector<Watercraft>& fleet,
                          const std::vector<Aircraft>& aircraft_pool, const ChainConfig& cfg) {
  check_chain_config(cfg, aircraft_pool);
  return ChainSearch(pickup, dest, fleet, aircraft_pool, cfg).solve();
}

std::optional<std::string> check_plan(const TransferPlan& plan, const GeoPoint& pickup, const GeoPoint& dest,
                                      const std::vector<Watercraft>& fleet,
                                      const std::vector<Aircraft>& aircraft_pool, const ChainConfig& cfg) {
  std::map<std::string, const Aircraft*> pool;
  for (const auto& a : aircraft_pool) pool[a.id] = &a;
  std::map<std::string, const Watercraft*> ships;
  for (const auto& w : fleet) ships[w.id] = &w;

  auto where = [&](const std::string& entity, double t) -> std::optional<GeoPoint> {
    if (entity == "pickup") return pickup;
    if (entity == "dest") return dest;
    if (entity.rfind("home:", 0) == 0) {
      auto it = pool.find(entity.substr(5));
      if (it == pool.end()) return std::nullopt;
      return it->second->home_base;
    }
    auto it = ships.find(entity);
    if (it == ships.end()) return std::nullopt;
    return watercraft_position(*it->second, t);
  };
  auto refuel_capable = [&](const std::string& entity, const Aircraft& ac, const GeoPoint& p) {
    auto it = ships.find(entity);
    if (it != ships.end()) return it->second->refuel;
    return colocated(p, ac.home_base);
  };

  struct AcState {
    std::string at;
    double t;
    double fuel;
  };
  std::map<std::string, AcState> state;
  const TransferLeg* last_carry = nullptr;
  double total = 0.0;
  for (std::size_t i = 0; i < plan.legs.size(); ++i) {
    const TransferLeg& leg = plan.legs[i];
    const std::string tag = "leg " + std::to_string(i) + ": ";
    auto ac_it = pool.find(leg.aircraft_id);
    if (ac_it == pool.end()) return tag + "unknown aircraft " + leg.aircraft_id;
    const Aircraft& ac = *ac_it->second;
    auto from = where(leg.from.entity, leg.depart_s);
    auto to = where(leg.to.entity, leg.arrive_s);
    if (!from || !to) return tag + "unknown endpoint";
    if (gc_distance(*from, leg.from.point).meters() > 1.0) return tag + "departure point is off its entity";
    if (gc_distance(*to, leg.to.point).meters() > 1.0) return tag + "arrival point is off its entity";
    if (leg.depart_s < cfg.t0_s - 1e-9) return tag + "departs before t0";
    const double d = gc_distance(leg.from.point, leg.to.point).meters();
    total += d;
    if ((leg.arrive_s - leg.depart_s) * ac.cruise_speed_mps < d - 1.0) return tag + "faster than cruise speed";

    auto [st, fresh] = state.try_emplace(ac.id, AcState{"home:" + ac.id, cfg.t0_s, ac.fuel_range_remaining.meters()});
    if (st->second.at != leg.from.entity) return tag + "not contiguous with the aircraft's previous leg";
    if (leg.depart_s < st->second.t - 1e-9) return tag + "overlaps the aircraft's previous leg";
    const bool capable = refuel_capable(leg.to.entity, ac, leg.to.point);
    if (leg.refuel && !capable) return tag + "refuels at a node without fuel";
    if (!leg_feasible(LengthM(std::max(0.0, st->second.fuel)), leg.from.point, leg.to.point, capable)) {
      return tag + "violates leg feasibility";
    }
    if (fresh && !leg_feasible(LengthM(st->second.fuel), leg.from.point, leg.to.point, false)) {
      return tag + "first sortie leaves the radius of action";
    }
    st->second = {leg.to.entity, leg.arrive_s, leg.refuel ? ac.max_range.meters() : st->second.fuel - d};

    if (leg.carrying_patient) {
      if (!last_carry) {
        if (leg.from.entity != "pickup") return tag + "patient does not start at the pickup";
      } else {
        if (leg.from.entity != last_carry->to.entity) return tag + "patient path is not contiguous";
        if (leg.depart_s < last_carry->arrive_s - 1e-9) return tag + "patient on two carriers at once";
      }
      last_carry = &leg;
    }
  }
  if (!last_carry || last_carry->to.entity != "dest") return std::string("patient never reaches the destination");
  if (std::abs(plan.total_time_s - (last_carry->arrive_s - cfg.t0_s)) > 1e-6) return std::string("total_time mismatch");
  if (std::abs(plan.total_distance.meters() - total) > 1e-3) return std::string("total_distance mismatch");
  return std::nullopt;
}

Placement place_dedicated_axp(const std::vector<GeoPoint>& candidates, const std::vector<DemandPair>& demand,
                              const std::vector<Watercraft>& fleet, const std::vector<Aircraft>& aircraft_pool,
                              const PlacementConfig& cfg) {
  if (candidates.empty()) throw ValidationError("candidates", "at least one candidate is required");
  if (!(cfg.dt_s > 0.0)) throw ValidationError("dt", "must be > 0");
  check_chain_config(cfg.chain, aircraft_pool);

  std::vector<double> instants;
  for (double t = cfg.t0_s; t < cfg.t0_s + cfg.horizon_s; t += cfg.dt_s) instants.push_back(t);
  if (instants.empty()) instants.push_back(cfg.t0_s);

  auto score = [&](const GeoPoint& at) {
    std::vector<Watercraft> ships = fleet;
    Watercraft dedicated;
    dedicated.id = kDedicatedAxpId;
    dedicated.route.waypoints = {at};
    dedicated.helipad = true;
    dedicated.refuel = true;
    ships.push_back(std::move(dedicated));
    std::size_t ok = 0;
    for (const auto& pair : demand) {
      for (double t : instants) {
        ChainConfig c = cfg.chain;
        c.t0_s = t;
        try {
          chain_search(pair.pickup, pair.dest, ships, aircraft_pool, c);
          ++ok;
        } catch (const NoFeasibleChain&) {
        }
      }
    }
    const std::size_t total = demand.size() * instants.size();
    return total ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;
  };

  std::vector<std::future<double>> jobs;
  for (const auto& c : candidates) jobs.push_back(std::async(std::launch::async, score, c));
  Placement out;
  for (auto& j : jobs) out.scores.push_back(j.get());
  for (std::size_t i = 1; i < out.scores.size(); ++i) {
    if (out.scores[i] > out.scores[out.index]) out.index = i;
  }
  out.location = candidates[out.index];
  out.coverage = out.scores[out.index];
  return out;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json ring(const Disk& d) {
  ordered_json coords = ordered_json::array();
  for (int k = 0; k < kBoundaryPoints; ++k) {
    const GeoPoint p = destination_point(d.center, 360.0 * k / kBoundaryPoints, d.radius);
    coords.push_back({p.lon(), p.lat()});
  }
  coords.push_back(coords.front());
  return coords;
}

ordered_json window_feature(const TimeWindow& w, const char* kind) {
  return {{"type", "Feature"},
          {"geometry", nullptr},
          {"properties", {{"kind", kind}, {"start", w.start_s}, {"end", w.end_s}, {"watercraft_ids", w.watercraft_ids}}}};
}

}  // namespace

std::string zone_geojson(const ZoneRegion& z, const std::vector<TimeWindow>& windows,
                         const std::vector<TimeWindow>& blackout_set) {
  ordered_json fc = {{"type", "FeatureCollection"}, {"properties", {{"empty", z.empty()}}}, {"features", ordered_json::array()}};
  for (std::size_t i = 0; i < z.disks().size(); ++i) {
    const Disk& d = z.disks()[i];
    fc["features"].push_back({{"type", "Feature"},
                              {"geometry", {{"type", "Polygon"}, {"coordinates", ordered_json::array({ring(d)})}}},
                              {"properties",
                               {{"kind", "disk"},
                                {"index", i},
                                {"center", {d.center.lon(), d.center.lat()}},
                                {"radius_m", d.radius.meters()}}}});
  }
  for (const auto& w : windows) fc["features"].push_back(window_feature(w, "window"));
  for (const auto& b : blackout_set) fc["features"].push_back(window_feature(b, "blackout"));
  return fc.dump();
}

std::string plan_geojson(const TransferPlan& plan) {
  ordered_json fc = {{"type", "FeatureCollection"},
                     {"properties",
                      {{"total_time_s", plan.total_time_s},
                       {"total_distance_m", plan.total_distance.meters()},
                       {"axp_watercraft", plan.axp_watercraft()}}},
                     {"features", ordered_json::array()}};
  for (const auto& leg : plan.legs) {
    fc["features"].push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "LineString"},
           {"coordinates", {{leg.from.point.lon(), leg.from.point.lat()}, {leg.to.point.lon(), leg.to.point.lat()}}}}},
         {"properties",
          {{"aircraft", leg.aircraft_id},
           {"from", leg.from.entity},
           {"to", leg.to.entity},
           {"depart", leg.depart_s},
           {"arrive", leg.arrive_s},
           {"refuel", leg.refuel},
           {"exchange_mode", to_string(leg.exchange_mode)},
           {"carrying_patient", leg.carrying_patient}}}});
  }
  return fc.dump();
}

}  // namespace medchain
