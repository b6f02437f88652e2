#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "medchain/errors.hpp"
#include "medchain/planner.hpp"
#include "medchain/simkit.hpp"

using namespace medchain;
using namespace medchain::testing;

namespace {

Aircraft aircraft_at(const std::string& id, GeoPoint home, double range_m) {
  Aircraft ac;
  ac.id = id;
  ac.home_base = home;
  ac.position = home;
  ac.cruise_speed_mps = 70.0;
  ac.max_range = LengthM(range_m);
  ac.fuel_range_remaining = LengthM(range_m);
  return ac;
}

EvacRequest request_at(GeoPoint where, const std::string& dest) {
  EvacRequest r;
  r.id = "r";
  r.location = where;
  r.precedence = Precedence::urgent;
  r.destination = dest;
  return r;
}

int total_visits(const Recommendation& rec) {
  return std::accumulate(rec.visit_counts.begin(), rec.visit_counts.end(), 0,
                         [](int n, const VisitCount& v) { return n + v.count; });
}

bool same(const Recommendation& a, const Recommendation& b) {
  if (!(a.action == b.action) || a.estimated_return != b.estimated_return) return false;
  if (a.visit_counts.size() != b.visit_counts.size()) return false;
  for (std::size_t i = 0; i < a.visit_counts.size(); ++i) {
    if (!(a.visit_counts[i].action == b.visit_counts[i].action) ||
        a.visit_counts[i].count != b.visit_counts[i].count ||
        a.visit_counts[i].mean_return != b.visit_counts[i].mean_return) {
      return false;
    }
  }
  return true;
}

double episode_return(const Scenario& sc, const Policy& p) { return run(sc, p, 1).total_return; }

}  // namespace

TEST_CASE("toy instance oracle") {
  const WorldState s = first_epoch(toy_scenario());
  const ExpectimaxResult ex = expectimax(s);
  REQUIRE(ex.argmax.size() == 1);
  CHECK(ex.argmax[0].aircraft_id == "B");
  CHECK(ex.argmax[0].request_id == "r1");
  // Greedy grabs the closer aircraft, which the oracle rejects.
  CHECK(greedy_policy(s).aircraft_id == "A");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PlannerConfig cfg;
    cfg.iterations = 10000;
    cfg.seed = seed;
    const Recommendation rec = plan(s, cfg);
    REQUIRE(rec.action == ex.argmax[0]);
    REQUIRE(total_visits(rec) == cfg.iterations);
  }
}

TEST_CASE("plan with only hold available") {
  const WorldState s = initial_state(toy_scenario());  // nothing has arrived yet
  PlannerConfig cfg;
  cfg.iterations = 50;
  const Recommendation rec = plan(s, cfg);
  CHECK(rec.action == DispatchAction::hold());
  REQUIRE(rec.visit_counts.size() == 1);
  CHECK(rec.visit_counts[0].count == 50);
}

TEST_CASE("plan is reproducible and counts every iteration") {
  const auto suite = random_suite(kSuiteSeed, 6);
  for (const auto& sc : suite) {
    const WorldState s = first_epoch(sc);
    if (episode_over(s)) continue;
    for (int workers : {1, 3}) {
      PlannerConfig cfg;
      cfg.iterations = 301;
      cfg.seed = 77;
      cfg.workers = workers;
      const Recommendation a = plan(s, cfg), b = plan(s, cfg);
      REQUIRE(same(a, b));
      REQUIRE(total_visits(a) == cfg.iterations);
      const auto legal = legal_actions(s);
      REQUIRE(std::find(legal.begin(), legal.end(), a.action) != legal.end());
      const auto best = std::max_element(a.visit_counts.begin(), a.visit_counts.end(),
                                         [](const VisitCount& x, const VisitCount& y) { return x.count < y.count; });
      REQUIRE(best->count == std::find_if(a.visit_counts.begin(), a.visit_counts.end(), [&](const VisitCount& v) {
                               return v.action == a.action;
                             })->count);
    }
  }
}

TEST_CASE("plan rejects bad input") {
  PlannerConfig cfg;
  CHECK_THROWS_AS(plan(initial_state(empty_scenario()), cfg), TerminalState);
  cfg.iterations = 0;
  CHECK_THROWS_AS(plan(first_epoch(toy_scenario()), cfg), ValidationError);
  cfg = PlannerConfig{};
  cfg.exploration_c = 0.0;
  CHECK_THROWS_AS(plan(first_epoch(toy_scenario()), cfg), ValidationError);
  cfg = PlannerConfig{};
  cfg.focus_request = "nope";
  CHECK_THROWS_AS(plan(first_epoch(toy_scenario()), cfg), UnknownRequest);
}

TEST_CASE("focus restricts root dispatches to one request") {
  Scenario sc = toy_scenario();
  sc.requests[1].time_s = 0.0;
  const WorldState s = first_epoch(sc);
  PlannerConfig cfg;
  cfg.iterations = 200;
  cfg.focus_request = "r2";
  const Recommendation rec = plan(s, cfg);
  for (const auto& v : rec.visit_counts) {
    CHECK((v.action.kind == ActionKind::hold || v.action.request_id == "r2"));
  }
}

TEST_CASE("greedy_policy") {
  SUBCASE("one idle aircraft in reach flies direct") {
    Scenario sc;
    sc.aircraft.push_back(aircraft_at("a1", GeoPoint(0, 0), 400000));
    sc.facilities.push_back({"f", GeoPoint(0, 0.3), 2});
    sc.requests.push_back(request_at(GeoPoint(0.2, 0.1), "f"));
    const DispatchAction a = greedy_policy(first_epoch(sc));
    CHECK(a.kind == ActionKind::dispatch_direct);
    CHECK(a.aircraft_id == "a1");
  }
  SUBCASE("two identical aircraft: lower id") {
    Scenario sc;
    sc.aircraft.push_back(aircraft_at("b", GeoPoint(0, 0), 400000));
    sc.aircraft.push_back(aircraft_at("a", GeoPoint(0, 0), 400000));
    sc.facilities.push_back({"f", GeoPoint(0, 0.3), 2});
    sc.requests.push_back(request_at(GeoPoint(0.2, 0.1), "f"));
    CHECK(greedy_policy(first_epoch(sc)).aircraft_id == "a");
  }
  SUBCASE("direct out of reach but one AXP bridges it") {
    const GeoPoint base_a(0, 0), pickup(0, 0.5), ship_at(0, 1.75), fac(0, 3.5);
    const double range = 400000;
    const LengthM fuel_at_pickup(range - gc_distance(base_a, pickup).meters());
    // Leg arithmetic: the direct carry breaks the half-fuel rule, every relay leg keeps it.
    REQUIRE_FALSE(leg_feasible(fuel_at_pickup, pickup, fac, false));
    REQUIRE(leg_feasible(fuel_at_pickup, pickup, ship_at, false));
    REQUIRE(gc_distance(pickup, ship_at).meters() + gc_distance(ship_at, base_a).meters() <=
            fuel_at_pickup.meters());
    REQUIRE(leg_feasible(LengthM(range), fac, ship_at, false));
    REQUIRE(leg_feasible(LengthM(range - gc_distance(fac, ship_at).meters()), ship_at, fac, true));

    Scenario sc;
    sc.aircraft.push_back(aircraft_at("a", base_a, range));
    sc.aircraft.push_back(aircraft_at("b", fac, range));
    Watercraft w;
    w.id = "ship";
    w.route.waypoints = {ship_at};
    w.helipad = true;
    sc.watercraft.push_back(w);
    sc.facilities.push_back({"f", fac, 2});
    sc.requests.push_back(request_at(pickup, "f"));
    const DispatchAction a = greedy_policy(first_epoch(sc));
    CHECK(a.kind == ActionKind::dispatch_via_axp);
    CHECK(a.aircraft_id == "a");
    CHECK(a.axp_watercraft_id == "ship");
    CHECK(a.receiving_aircraft_id == "b");
  }
  SUBCASE("terminal state") { CHECK_THROWS_AS(greedy_policy(initial_state(empty_scenario())), TerminalState); }
}

TEST_CASE("evaluate_policy") {
  SUBCASE("deterministic scenario has no spread across episodes") {
    const MetricsSummary one = evaluate_policy(toy_scenario(), greedy_policy_fn(), 1, 9);
    const MetricsSummary four = evaluate_policy(toy_scenario(), greedy_policy_fn(), 4, 9);
    CHECK(four.episodes == 4);
    CHECK(four.time_to_facility.count == 8);
    CHECK(four.time_to_facility.mean == doctest::Approx(one.time_to_facility.mean).epsilon(1e-12));
    CHECK(four.response_time.mean == doctest::Approx(one.response_time.mean).epsilon(1e-12));
    CHECK(to_jsonl(run(toy_scenario(), greedy_policy_fn(), 1).log) ==
          to_jsonl(run(toy_scenario(), greedy_policy_fn(), 2).log));
  }
  SUBCASE("empty scenario") {
    const MetricsSummary m = evaluate_policy(empty_scenario(), greedy_policy_fn(), 3, 1);
    CHECK(m.response_time.count == 0);
    CHECK(m.time_to_facility.count == 0);
    CHECK(m.axp_dwell.count == 0);
    CHECK(m.utilization.count == 0);
    CHECK(m.time_to_facility.mean == 0.0);
  }
  CHECK_THROWS_AS(evaluate_policy(toy_scenario(), greedy_policy_fn(), 0, 1), ValidationError);
}

TEST_CASE("MCTS return is at least greedy's on the randomized suite") {
  const auto suite = random_suite(kSuiteSeed, 50);
  PlannerConfig cfg;
  int wins = 0;
  for (const auto& sc : suite) {
    const double m = episode_return(sc, mcts_policy_fn(cfg));
    const double g = episode_return(sc, greedy_policy_fn());
    if (m >= g - 1e-9) ++wins;
  }
  MESSAGE("MCTS return >= greedy on " << wins << "/50");
  CHECK(wins >= 45);
}
