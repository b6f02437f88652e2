#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <cmath>
#include <limits>

#include <unistd.h>

#include "medchain/random.hpp"

namespace medchain::testing {

namespace {

Aircraft make_aircraft(const std::string& id, GeoPoint home, double speed_mps, double range_m) {
  Aircraft ac;
  ac.id = id;
  ac.home_base = home;
  ac.position = home;
  ac.cruise_speed_mps = speed_mps;
  ac.max_range = LengthM(range_m);
  ac.fuel_range_remaining = LengthM(range_m);
  return ac;
}

EvacRequest make_request(const std::string& id, double t, GeoPoint where, Precedence p, const std::string& dest) {
  EvacRequest r;
  r.id = id;
  r.time_s = t;
  r.location = where;
  r.precedence = p;
  r.destination = dest;
  return r;
}

}  // namespace

Scenario toy_scenario() {
  Scenario sc;
  sc.id = "toy";
  sc.aircraft.push_back(make_aircraft("A", GeoPoint(0.0, 0.0), 70.0, 1.0e6));
  sc.aircraft.push_back(make_aircraft("B", GeoPoint(0.0, 1.5), 70.0, 1.0e6));
  sc.facilities.push_back({"F", GeoPoint(0.0, -0.3), 2});
  sc.requests.push_back(make_request("r1", 0.0, GeoPoint(0.2, 0.1), Precedence::routine, "F"));
  sc.requests.push_back(make_request("r2", 600.0, GeoPoint(-0.2, 0.1), Precedence::urgent, "F"));
  return sc;
}

Scenario empty_scenario() {
  Scenario sc;
  sc.id = "empty";
  return sc;
}

WorldState first_epoch(const Scenario& sc) { return begin_episode(initial_state(sc)).next_state; }

ExpectimaxResult expectimax(const WorldState& root) {
  ExpectimaxResult out;
  RandomStream unused(0);
  std::function<double(const WorldState&, int)> value = [&](const WorldState& s, int depth) -> double {
    ++out.nodes;
    out.depth = std::max(out.depth, depth);
    if (episode_over(s)) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& a : legal_actions(s)) {
      Transition tr = step(s, a, unused);
      best = std::max(best, tr.reward + value(tr.next_state, depth + 1));
    }
    return best;
  };
  out.root_actions = legal_actions(root);
  out.value = -std::numeric_limits<double>::infinity();
  for (const auto& a : out.root_actions) {
    Transition tr = step(root, a, unused);
    const double v = tr.reward + value(tr.next_state, 1);
    out.root_values.push_back(v);
    out.value = std::max(out.value, v);
  }
  for (std::size_t i = 0; i < out.root_actions.size(); ++i) {
    if (out.root_values[i] >= out.value - 1e-9) out.argmax.push_back(out.root_actions[i]);
  }
  return out;
}

std::vector<Scenario> random_suite(std::uint64_t seed, int count) {
  // Two island groups roughly 150 km apart with shipping lanes between them.
  const GeoPoint bases[] = {GeoPoint(21.48, -158.04), GeoPoint(21.32, -157.92), GeoPoint(22.02, -159.79),
                            GeoPoint(21.95, -159.35)};
  const GeoPoint hospitals[] = {GeoPoint(21.36, -157.89), GeoPoint(21.40, -157.75), GeoPoint(21.97, -159.36),
                                GeoPoint(22.07, -159.55)};
  std::vector<Scenario> out;
  RandomStream root(seed);
  for (int k = 0; k < count; ++k) {
    RandomStream rng = root.split(static_cast<std::uint64_t>(k));
    auto pick = [&](int n) { return static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n)); };
    Scenario sc;
    sc.id = "suite_" + std::to_string(k);
    const int n_aircraft = 2 + pick(2);
    for (int i = 0; i < n_aircraft; ++i) {
      const GeoPoint home = bases[pick(4)];
      sc.aircraft.push_back(make_aircraft("ac" + std::to_string(i + 1), home, 145.0 * kKnotMps,
                                          LengthM::from_statute_miles(320.0).meters()));
    }
    const int n_water = 1 + pick(2);
    for (int i = 0; i < n_water; ++i) {
      Watercraft w;
      w.id = "ship" + std::to_string(i + 1);
      const GeoPoint a(rng.uniform(21.3, 22.0), rng.uniform(-159.6, -158.1));
      const GeoPoint b(rng.uniform(21.3, 22.0), rng.uniform(-159.6, -158.1));
      w.route.waypoints = {a, b};
      w.route.leg_speeds_mps = {rng.uniform(5.0, 15.0) * kKnotMps};
      w.route.loop = true;
      w.helipad = pick(2) == 0;
      w.refuel = w.helipad && pick(2) == 0;
      w.med_level = MedLevel::medic;
      sc.watercraft.push_back(w);
    }
    for (int i = 0; i < 4; ++i) {
      sc.facilities.push_back({"mtf" + std::to_string(i + 1), hospitals[i], 2 + (i % 2)});
    }
    const int n_requests = 3 + pick(2);
    for (int i = 0; i < n_requests; ++i) {
      const GeoPoint near = bases[pick(4)];
      const GeoPoint where(near.lat() + rng.uniform(-0.35, 0.35), near.lon() + rng.uniform(-0.35, 0.35));
      const auto prec = static_cast<Precedence>(pick(3));
      const double t = std::floor(rng.uniform(0.0, 3600.0));
      sc.requests.push_back(make_request("r" + std::to_string(i + 1), t, where, prec,
                                         sc.facilities[static_cast<std::size_t>(pick(4))].id));
    }
    out.push_back(std::move(sc));
  }
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("medchain_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path golden_dir() { return MEDCHAIN_GOLDEN_DIR; }

bool relaxed_reachable(const GeoPoint& pickup, const GeoPoint& dest, const std::vector<Watercraft>& fleet,
                       const std::vector<Aircraft>& pool) {
  struct Node {
    GeoPoint p;
    bool ship_refuel;
  };
  std::vector<Node> nodes{{pickup, false}, {dest, false}};
  for (const auto& w : fleet) nodes.push_back({w.route.waypoints.front(), w.refuel});
  const std::size_t n = nodes.size();

  std::set<std::pair<std::size_t, std::uint64_t>> seen;
  std::function<bool(std::size_t, std::uint64_t)> patient_at = [&](std::size_t at, std::uint64_t used) {
    if (at == 1) return true;
    if (!seen.insert({at, used}).second) return false;
    for (std::size_t a = 0; a < pool.size(); ++a) {
      if (used & (std::uint64_t{1} << a)) continue;
      const Aircraft& ac = pool[a];
      const double first = gc_distance(ac.home_base, nodes[at].p).meters();
      if (first > ac.fuel_range_remaining.meters() / 2.0 + 1.0) continue;
      const double fuel0 = nodes[at].ship_refuel ? ac.max_range.meters() : ac.fuel_range_remaining.meters() - first;
      // Every node this aircraft can carry the patient to, with refuelling at
      // refuel-capable ships and at its own home along the way.
      std::vector<double> best(n + 1, -1.0);
      std::function<void(std::size_t, double)> fly = [&](std::size_t from, double fuel) {
        if (fuel <= best[from]) return;
        best[from] = fuel;
        const GeoPoint here = from == n ? ac.home_base : nodes[from].p;
        for (std::size_t to = 0; to <= n; ++to) {
          if (to == from) continue;
          const GeoPoint there = to == n ? ac.home_base : nodes[to].p;
          const bool refuel = to == n || (to < n && nodes[to].ship_refuel) || colocated(there, ac.home_base);
          const double d = gc_distance(here, there).meters();
          if (d > (refuel ? fuel : fuel / 2.0) + 1.0) continue;
          fly(to, refuel ? ac.max_range.meters() : fuel - d);
        }
      };
      fly(at, fuel0);
      for (std::size_t to = 0; to < n; ++to) {
        if (to != at && best[to] >= 0.0 && patient_at(to, used | (std::uint64_t{1} << a))) return true;
      }
    }
    return false;
  };
  return patient_at(0, 0);
}

}  // namespace medchain::testing
