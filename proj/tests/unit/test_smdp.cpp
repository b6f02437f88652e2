#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "medchain/errors.hpp"
#include "medchain/planner.hpp"
#include "medchain/random.hpp"
#include "medchain/scenario.hpp"
#include "medchain/smdp.hpp"

using namespace medchain;
using namespace medchain::testing;

namespace {

Aircraft aircraft_at(const std::string& id, GeoPoint home, double speed, double range) {
  Aircraft ac;
  ac.id = id;
  ac.home_base = home;
  ac.position = home;
  ac.cruise_speed_mps = speed;
  ac.max_range = LengthM(range);
  ac.fuel_range_remaining = LengthM(range);
  return ac;
}

// Base, pickup and facility on a 10 km triangle.
struct Triangle {
  GeoPoint base{0.0, 0.0};
  GeoPoint pickup = destination_point(base, 90.0, LengthM(10000.0));
  GeoPoint facility = destination_point(base, 30.0, LengthM(10000.0));
};

Scenario triangle_scenario(Precedence p, double speed = 50.0) {
  const Triangle tri;
  Scenario sc;
  sc.aircraft.push_back(aircraft_at("a1", tri.base, speed, 500000.0));
  sc.facilities.push_back({"f", tri.facility, 2});
  EvacRequest r;
  r.id = "r";
  r.location = tri.pickup;
  r.precedence = p;
  r.destination = "f";
  sc.requests.push_back(r);
  return sc;
}

double run_return(const Scenario& sc, const std::function<DispatchAction(const WorldState&)>& pick) {
  RandomStream rng(1);
  Transition tr = begin_episode(initial_state(sc));
  double ret = tr.reward;
  WorldState s = tr.next_state;
  while (!episode_over(s)) {
    tr = step(s, pick(s), rng);
    REQUIRE(tr.reward <= 0.0);
    REQUIRE(tr.next_state.clock == s.clock + tr.sojourn);
    ret += tr.reward;
    s = tr.next_state;
  }
  return ret;
}

std::multiset<std::string> request_ids(const WorldState& s) {
  std::multiset<std::string> ids;
  for (const auto& r : s.scheduled) ids.insert(r.id);
  for (const auto& r : s.pending) ids.insert(r.id);
  for (const auto& t : s.in_transit) ids.insert(t.request.id);
  for (const auto& d : s.delivered) ids.insert(d.request_id);
  return ids;
}

// Returns of every action sequence from s, keyed by the sequence description.
void all_returns(const WorldState& s, std::string prefix, double acc, std::map<std::string, double>& out) {
  if (episode_over(s)) {
    out[prefix] = acc;
    return;
  }
  RandomStream rng(0);
  for (const auto& a : legal_actions(s)) {
    Transition tr = step(s, a, rng);
    all_returns(tr.next_state, prefix + describe(a) + ";", acc + tr.reward, out);
  }
}

}  // namespace

TEST_CASE("legal_actions") {
  SUBCASE("nothing pending leaves only hold") {
    Scenario sc = toy_scenario();
    WorldState s = initial_state(sc);  // requests scripted, not yet arrived
    CHECK(legal_actions(s) == std::vector<DispatchAction>{DispatchAction::hold()});
  }
  SUBCASE("mpw2023 offers the exercise hand-off through LSV-3") {
    const WorldState s = first_epoch(load_scenario("mpw2023"));
    const auto actions = legal_actions(s);
    const bool found = std::any_of(actions.begin(), actions.end(), [](const DispatchAction& a) {
      return a.kind == ActionKind::dispatch_via_axp && a.aircraft_id == "ac1" && a.request_id == "req1" &&
             a.axp_watercraft_id == "LSV-3" && a.receiving_aircraft_id == "ac2";
    });
    CHECK(found);
    CHECK(actions.back() == DispatchAction::hold());
    CHECK(std::is_sorted(actions.begin(), actions.end() - 1, action_less));
  }
  SUBCASE("a request beyond every reach leaves only hold") {
    Scenario sc = triangle_scenario(Precedence::urgent);
    sc.requests[0].location = GeoPoint(40.0, 60.0);
    const WorldState s = first_epoch(sc);
    CHECK(legal_actions(s) == std::vector<DispatchAction>{DispatchAction::hold()});
  }
  SUBCASE("cabin size is a hard limit") {
    Scenario sc = triangle_scenario(Precedence::urgent);
    sc.requests[0].patient_count = 3;
    CHECK(legal_actions(first_epoch(sc)).size() == 1);
    sc.requests[0].patient_count = 2;
    CHECK(legal_actions(first_epoch(sc)).size() == 2);
  }
  SUBCASE("via-AXP pairs two distinct aircraft") {
    for (const auto& sc : random_suite(kSuiteSeed, 10)) {
      const WorldState s = first_epoch(sc);
      for (const auto& a : legal_actions(s)) {
        if (a.kind == ActionKind::dispatch_via_axp) {
          REQUIRE(a.axp_watercraft_id);
          REQUIRE(a.receiving_aircraft_id);
          REQUIRE(*a.receiving_aircraft_id != a.aircraft_id);
          REQUIRE(a.receiver_launch_time);
        } else if (a.kind == ActionKind::dispatch_direct) {
          REQUIRE_FALSE(a.axp_watercraft_id);
          REQUIRE_FALSE(a.receiving_aircraft_id);
        }
        if (a.kind == ActionKind::hold) continue;
        REQUIRE(a.launch_time >= s.clock);
        REQUIRE(a.launch_time % 10000 == 0);
      }
    }
  }
}

TEST_CASE("direct dispatch return matches hand kinematics") {
  const Triangle tri;
  const double speed = 50.0;
  const double out_s = gc_distance(tri.base, tri.pickup).meters() / speed;
  const double to_fac_s = gc_distance(tri.pickup, tri.facility).meters() / speed;
  // Out, land to load, fly to the facility, land to unload.
  const double undelivered_s = to_seconds(ceil_ms(out_s)) + 180.0 + to_seconds(ceil_ms(to_fac_s)) + 180.0;
  CHECK(out_s == doctest::Approx(200.0));
  for (auto [p, w] : {std::pair{Precedence::urgent, 4.0}, {Precedence::priority, 2.0}, {Precedence::routine, 1.0}}) {
    const double ret = run_return(triangle_scenario(p, speed), [](const WorldState& s) {
      return legal_actions(s).front();
    });
    CHECK(ret == doctest::Approx(-w * undelivered_s).epsilon(1e-12));
  }
}

TEST_CASE("step") {
  SUBCASE("hold with nobody waiting costs nothing and jumps to the next arrival") {
    const WorldState s = initial_state(toy_scenario());
    RandomStream rng(0);
    Scenario sc = toy_scenario();
    sc.requests[0].time_s = 900.0;
    sc.requests[1].time_s = 1200.0;
    const WorldState quiet = initial_state(sc);
    const Transition tr = step(quiet, DispatchAction::hold(), rng);
    CHECK(tr.reward == 0.0);
    CHECK(tr.sojourn == 900000);
    CHECK(tr.next_state.pending.size() == 1);
  }
  SUBCASE("dispatching a busy aircraft is illegal") {
    const WorldState s = first_epoch(toy_scenario());
    RandomStream rng(0);
    const DispatchAction a = legal_actions(s).front();
    const Transition tr = step(s, a, rng);
    DispatchAction again = a;
    CHECK_THROWS_AS(step(tr.next_state, again, rng), IllegalAction);
    DispatchAction bogus = a;
    bogus.aircraft_id = "nope";
    CHECK_THROWS_AS(step(s, bogus, rng), IllegalAction);
  }
  SUBCASE("deterministic mode is a pure function of state and action") {
    for (const auto& sc : random_suite(kSuiteSeed, 5)) {
      const WorldState s = first_epoch(sc);
      for (const auto& a : legal_actions(s)) {
        RandomStream r1(1), r2(999);
        const Transition t1 = step(s, a, r1), t2 = step(s, a, r2);
        REQUIRE(t1.reward == t2.reward);
        REQUIRE(t1.sojourn == t2.sojourn);
        REQUIRE(t1.events == t2.events);
      }
    }
  }
  SUBCASE("stochastic service times stay within the noise band") {
    Scenario sc = triangle_scenario(Precedence::urgent);
    sc.service.stochastic = true;
    const double det = -run_return(triangle_scenario(Precedence::urgent), [](const WorldState& s) {
      return legal_actions(s).front();
    }) / 4.0;
    std::set<double> seen;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RandomStream rng(seed);
      WorldState s = first_epoch(sc);
      double ret = 0.0;
      while (!episode_over(s)) {
        Transition tr = step(s, legal_actions(s).front(), rng);
        ret += tr.reward;
        s = tr.next_state;
      }
      const double undelivered = -ret / 4.0;
      seen.insert(undelivered);
      // Only the two 180 s landings are noisy.
      REQUIRE(undelivered >= det - 0.2 * 360.0 - 0.002);
      REQUIRE(undelivered <= det + 0.2 * 360.0 + 0.002);
    }
    CHECK(seen.size() > 10);
  }
}

TEST_CASE("is_terminal") {
  CHECK(is_terminal(initial_state(empty_scenario())));
  const Scenario mpw = load_scenario("mpw2023");
  CHECK_FALSE(is_terminal(initial_state(mpw)));
  const double ret = run_return(mpw, [](const WorldState& s) { return greedy_policy(s); });
  CHECK(ret < 0.0);
}

TEST_CASE("process properties over the randomized suite") {
  for (const auto& sc : random_suite(kSuiteSeed, 20)) {
    std::multiset<std::string> all;
    for (const auto& r : sc.requests) all.insert(r.id);
    RandomStream rng(7);
    Transition tr = begin_episode(initial_state(sc));
    WorldState s = tr.next_state;
    REQUIRE(request_ids(s) == all);
    while (!episode_over(s)) {
      const auto actions = legal_actions(s);
      const DispatchAction a = actions[rng.next_u64() % actions.size()];
      tr = step(s, a, rng);
      REQUIRE(tr.reward <= 0.0);
      REQUIRE(tr.next_state.clock >= s.clock);
      REQUIRE(request_ids(tr.next_state) == all);
      s = tr.next_state;
    }
  }
}

TEST_CASE("hold-only episodes end within arrivals + 1 steps") {
  for (const auto& sc : random_suite(kSuiteSeed, 20)) {
    RandomStream rng(0);
    WorldState s = initial_state(sc);
    int steps = 0;
    while (!episode_over(s)) {
      s = step(s, DispatchAction::hold(), rng).next_state;
      ++steps;
    }
    REQUIRE(steps <= static_cast<int>(sc.requests.size()) + 1);
  }
}

TEST_CASE("scaling precedence weights keeps the ranking of action sequences") {
  Scenario sc = toy_scenario();
  std::map<std::string, double> base, scaled;
  all_returns(first_epoch(sc), "", 0.0, base);
  for (auto& w : sc.service.precedence_weights) w *= 3.5;
  all_returns(first_epoch(sc), "", 0.0, scaled);
  REQUIRE(base.size() == scaled.size());
  REQUIRE(base.size() > 3);
  for (const auto& [k1, v1] : base) {
    for (const auto& [k2, v2] : base) {
      REQUIRE((v1 < v2) == (scaled.at(k1) < scaled.at(k2)));
    }
  }
}

TEST_CASE("earlier delivery strictly improves the return") {
  auto first = [](const WorldState& s) { return legal_actions(s).front(); };
  const double slow = run_return(triangle_scenario(Precedence::priority, 50.0), first);
  const double fast = run_return(triangle_scenario(Precedence::priority, 60.0), first);
  CHECK(fast > slow);
}

TEST_CASE("stalled episodes charge the stranded patients") {
  Scenario sc = triangle_scenario(Precedence::routine);
  sc.requests[0].location = GeoPoint(40.0, 60.0);
  const Transition tr = begin_episode(initial_state(sc));
  CHECK(tr.next_state.stalled);
  CHECK(episode_over(tr.next_state));
  CHECK(tr.reward == doctest::Approx(-sc.service.stall_penalty_s));
}

TEST_CASE("commit_dispatch keeps the clock") {
  const WorldState s = first_epoch(toy_scenario());
  RandomStream rng(0);
  const Transition tr = commit_dispatch(s, legal_actions(s).front(), rng);
  CHECK(tr.next_state.clock == s.clock);
  CHECK(tr.next_state.in_transit.size() == 1);
  CHECK_THROWS_AS(commit_dispatch(s, DispatchAction::hold(), rng), IllegalAction);
}

TEST_CASE("advance_to moves aircraft along their legs") {
  const WorldState s = first_epoch(load_scenario("mpw2023"));
  RandomStream rng(0);
  DispatchAction via;
  for (const auto& a : legal_actions(s)) {
    if (a.kind == ActionKind::dispatch_via_axp && a.axp_watercraft_id == "LSV-3") via = a;
  }
  REQUIRE(via.kind == ActionKind::dispatch_via_axp);
  const WorldState committed = commit_dispatch(s, via, rng).next_state;
  const WorldState later = advance_to(committed, via.launch_time + 30000).next_state;
  const Aircraft* ac1 = later.find_aircraft("ac1");
  REQUIRE(ac1);
  CHECK(ac1->status == AircraftStatus::enroute);
  const double flown = gc_distance(ac1->home_base, aircraft_position(later, *ac1)).meters();
  CHECK(flown == doctest::Approx(30.0 * ac1->cruise_speed_mps).epsilon(1e-3));
}
