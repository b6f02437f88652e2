// Acceptance run: one PASS/FAIL line per headline criterion. Exits non-zero
// when any criterion fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "fixtures.hpp"
#include "medchain/errors.hpp"
#include "medchain/planner.hpp"
#include "medchain/random.hpp"
#include "medchain/scenario.hpp"
#include "medchain/simkit.hpp"
#include "medchain/zones.hpp"

using namespace medchain;
using namespace medchain::testing;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("threw: ") + e.what()};
  }
  const double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (took > budget_s) {
    v.pass = false;
    v.detail += " (over the " + std::to_string(static_cast<int>(budget_s)) + " s budget)";
  }
  if (!v.pass) ++failures;
  std::cout << (v.pass ? "PASS" : "FAIL") << "  " << name << ": " << v.detail << " [" << std::fixed
            << std::setprecision(2) << took << " s]" << std::endl;
}

std::string fmt(double x, int prec = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(prec) << x;
  return s.str();
}

constexpr long double kPiL = 3.141592653589793238462643383279502884L;

double cosine_law_m(const GeoPoint& a, const GeoPoint& b) {
  const long double p1 = a.lat() * kPiL / 180.0L, p2 = b.lat() * kPiL / 180.0L;
  const long double dl = (b.lon() - a.lon()) * kPiL / 180.0L;
  long double c = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
  c = std::clamp(c, -1.0L, 1.0L);
  return static_cast<double>(6371000.0L * std::acos(c));
}

Verdict radius() {
  const LengthM roa = radius_of_action(LengthM::from_statute_miles(1228.0));
  return {roa.statute_miles() == 614.0, "radius_of_action(1228 mi) = " + fmt(roa.statute_miles(), 6) + " mi"};
}

Verdict manila_guam() {
  const double mi = gc_distance(GeoPoint(14.5995, 120.9842), GeoPoint(13.4443, 144.7937)).statute_miles();
  const double err = std::abs(mi - 1600.0) / 1600.0;
  return {err <= 0.10, "Manila-Guam " + fmt(mi, 1) + " mi, " + fmt(100 * err, 2) + "% from 1600"};
}

Verdict fig7() {
  const Scenario sc = load_scenario("fig7_manila_guam");
  const GeoPoint pickup = sc.requests.at(0).location;
  const GeoPoint dest = sc.facilities.at(0).location;
  const ChainConfig cfg;
  const TransferPlan plan = chain_search(pickup, dest, sc.watercraft, sc.aircraft, cfg);
  if (auto bad = check_plan(plan, pickup, dest, sc.watercraft, sc.aircraft, cfg)) return {false, "plan: " + *bad};
  auto ship = [&](const std::string& id) -> const Watercraft* {
    for (const auto& w : sc.watercraft) if (w.id == id) return &w;
    return nullptr;
  };
  bool ship_refuel = false;
  for (const auto& leg : plan.legs) {
    const Watercraft* w = ship(leg.to.entity);
    if (w && w->refuel && leg.refuel) ship_refuel = true;
  }
  const auto axps = plan.axp_watercraft();
  const bool one_underway = axps.size() == 1 && ship(axps[0]) && ship(axps[0])->route.waypoints.size() > 1;

  std::vector<Watercraft> fleet;
  for (const auto& w : sc.watercraft) if (w.id != "transit_vessel") fleet.push_back(w);
  bool none = false;
  try {
    chain_search(pickup, dest, fleet, sc.aircraft, cfg);
  } catch (const NoFeasibleChain&) {
    none = true;
  }
  const bool oracle_none = !relaxed_reachable(pickup, dest, fleet, sc.aircraft);
  std::string detail = "plan " + fmt(plan.total_time_s / 3600.0, 2) + " h, ship refuel " +
                       (ship_refuel ? "yes" : "no") + ", AXPs [";
  for (const auto& a : axps) detail += a;
  detail += "]; without transit_vessel: search " + std::string(none ? "NoFeasibleChain" : "found a plan") +
            ", relay enumeration " + (oracle_none ? "none" : "some");
  return {ship_refuel && one_underway && none && oracle_none, detail};
}

Verdict mpw2023() {
  const Scenario sc = load_scenario("mpw2023");
  const RunResult r = run(sc, mcts_policy_fn(PlannerConfig{}), 7);
  const std::vector<std::pair<EventKind, std::string>> order = {
      {EventKind::Launch, "ac1"},          {EventKind::ArrivePickup, "ac1"},  {EventKind::ServiceComplete, "ac1"},
      {EventKind::ArriveAXP, "ac1"},       {EventKind::PatientDropoff, "ac1"}, {EventKind::ArriveAXP, "ac2"},
      {EventKind::PatientPickup, "ac2"},   {EventKind::ArriveFacility, "ac2"}, {EventKind::Delivered, "ac2"}};
  std::size_t next = 0;
  for (const auto& e : r.log) {
    if (next < order.size() && e.kind == order[next].first && e.aircraft == order[next].second) ++next;
  }
  const bool ordered = next == order.size();
  double dwell = -1.0;
  if (!r.metrics.requests.empty() && r.metrics.requests[0].axp_dwell_s.size() == 1) {
    dwell = r.metrics.requests[0].axp_dwell_s[0];
  }
  const bool ok = ordered && dwell > 0.0 && dwell <= 180.0 && replay_check(r.log, sc).ok;
  return {ok, std::string("seed 7, relay order ") + (ordered ? "matches" : "differs") + ", dwell " + fmt(dwell) + " s"};
}

Verdict toy() {
  const WorldState s = first_epoch(toy_scenario());
  const ExpectimaxResult ex = expectimax(s);
  if (ex.argmax.size() != 1) return {false, "oracle argmax is not unique"};
  std::vector<int> matches;
  for (int iters : {100, 1000, 10000}) {
    int m = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      PlannerConfig cfg;
      cfg.iterations = iters;
      cfg.seed = seed;
      m += plan(s, cfg).action == ex.argmax[0];
    }
    matches.push_back(m);
  }
  const bool monotone = matches[0] <= matches[1] && matches[1] <= matches[2];
  return {matches[2] == 100 && monotone,
          "expectimax over " + std::to_string(ex.nodes) + " nodes; matches " + std::to_string(matches[0]) + " / " +
              std::to_string(matches[1]) + " / " + std::to_string(matches[2]) + " of 100 at 100 / 1k / 10k"};
}

Verdict zones() {
  const GeoPoint a(21.48, -158.04), b(21.98, -159.34);
  const LengthM ra(120000), rb(90000);
  const ZoneRegion z = opportunity_zone(a, ra, b, rb);
  RandomStream rng(10000);
  int mismatches = 0, inside = 0;
  for (int i = 0; i < 10000; ++i) {
    const GeoPoint p(rng.uniform(20.5, 23.0), rng.uniform(-160.5, -157.0));
    const bool want = cosine_law_m(a, p) <= ra.meters() && cosine_law_m(b, p) <= rb.meters();
    inside += want;
    mismatches += z.contains(p) != want;
  }

  const GeoPoint c(21.5, -158.5);
  const ZoneRegion track_zone({{c, LengthM(30000)}, {destination_point(c, 0.0, LengthM(5000)), LengthM(28000)}});
  Watercraft w;
  w.id = "lsv";
  w.route.waypoints = {destination_point(c, 270.0, LengthM(80000)), destination_point(c, 90.0, LengthM(80000))};
  w.route.leg_speeds_mps = {10.0};
  auto in = [&](double t) { return track_zone.contains(watercraft_position(w, t)); };
  auto crossing = [&](double lo, double hi) {
    const bool lo_in = in(lo);
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (in(mid) == lo_in ? lo : hi) = mid;
    }
    return hi;
  };
  const double entry = crossing(0.0, 8000.0), exit = crossing(8000.0, 16000.0);
  bool windows_ok = true;
  double worst = 0.0;
  for (double dt : {1.0, 60.0, 300.0}) {
    const auto windows = zone_windows(track_zone, {w}, 0.0, 20000.0, dt);
    if (windows.size() != 1) {
      windows_ok = false;
      continue;
    }
    const double e1 = std::abs(windows[0].start_s - entry), e2 = std::abs(windows[0].end_s - exit);
    worst = std::max(worst, std::max(e1, e2) / dt);
    windows_ok = windows_ok && e1 <= dt && e2 <= dt;
  }
  return {mismatches == 0 && windows_ok,
          std::to_string(mismatches) + " mismatches in 10000 points (" + std::to_string(inside) +
              " inside); window endpoints within " + fmt(worst, 3) + " dt of the crossings"};
}

int shell(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

Verdict determinism() {
  const auto dir = scratch_dir("acceptance");
  std::vector<std::string> logs;
  for (const char* name : {"a.jsonl", "b.jsonl"}) {
    const auto path = dir / name;
    const int code = shell(std::string(MEDCHAIN_CLI_PATH) + " simulate oahu_kauai --policy mcts --seed 42 --out " +
                           path.string() + " >/dev/null");
    if (code != 0) return {false, "simulate exited with " + std::to_string(code)};
    logs.push_back(read_file(path));
  }
  const bool same = !logs[0].empty() && logs[0] == logs[1];
  return {same, "oahu_kauai mcts seed 42: " + std::to_string(logs[0].size()) + " bytes, " +
                    (same ? "identical" : "different")};
}

// Requests that never reach a facility count as infinitely late.
double mean_ttf(const RunResult& r) {
  if (r.metrics.requests.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& q : r.metrics.requests) {
    sum += q.time_to_facility_s ? *q.time_to_facility_s : std::numeric_limits<double>::infinity();
  }
  return sum / static_cast<double>(r.metrics.requests.size());
}

Verdict dominance() {
  const auto suite = random_suite(kSuiteSeed, 50);
  int wins = 0;
  std::string losses;
  for (const auto& sc : suite) {
    const double m = mean_ttf(run(sc, mcts_policy_fn(PlannerConfig{}), 1));
    const double g = mean_ttf(run(sc, greedy_policy_fn(), 1));
    if (m <= g + 1e-9) {
      ++wins;
    } else {
      losses += " " + sc.id;
    }
  }
  const double frac = wins / 50.0;
  return {frac >= 0.90, "MCTS mean time-to-facility <= greedy on " + std::to_string(wins) + "/50 (" +
                            fmt(100 * frac, 0) + "%, need 90%); behind on" + losses};
}

}  // namespace

int main() {
  criterion("radius of action", 1, radius);
  criterion("Manila-Guam distance", 1, manila_guam);
  criterion("Manila-Guam chain feasibility", 10, fig7);
  criterion("mpw2023 relay replay", 60, mpw2023);
  criterion("planner matches expectimax on the toy instance", 300, toy);
  criterion("zone oracle equivalence", 30, zones);
  criterion("simulate determinism", 60, determinism);
  criterion("MCTS dominates greedy on the randomized suite", 900, dominance);
  std::cout << (failures ? std::to_string(failures) + " criterion(s) failed" : "all criteria passed") << std::endl;
  return failures ? 1 : 0;
}
