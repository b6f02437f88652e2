#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "medchain/medchain.h"

using namespace medchain::testing;
using nlohmann::json;

namespace {

// Takes ownership of a string returned through the C API.
std::string take(char* s) {
  std::string out = s ? s : "";
  medchain_string_free(s);
  return out;
}

struct Scn {
  medchain_scenario* p = nullptr;
  explicit Scn(const char* id) { REQUIRE(medchain_scenario_load(id, &p) == MEDCHAIN_OK); }
  ~Scn() { medchain_scenario_free(p); }
};

struct Sess {
  medchain_session* p = nullptr;
  explicit Sess(const Scn& sc) { REQUIRE(medchain_session_create(sc.p, &p) == MEDCHAIN_OK); }
  ~Sess() { medchain_session_free(p); }
};

json call(medchain_status (*fn)(medchain_session*, const char*, char**), medchain_session* s, const json& body,
          medchain_status want = MEDCHAIN_OK) {
  char* out = nullptr;
  const medchain_status st = fn(s, body.dump().c_str(), &out);
  INFO(medchain_last_error());
  REQUIRE(st == want);
  const std::string text = take(out);
  return text.empty() ? json() : json::parse(text);
}

std::string simulate(const medchain_scenario* sc, const char* policy, uint64_t seed) {
  char* log = nullptr;
  REQUIRE(medchain_simulate(sc, policy, seed, nullptr, &log, nullptr) == MEDCHAIN_OK);
  return take(log);
}

}  // namespace

TEST_CASE("library basics") {
  CHECK(std::strlen(medchain_version()) > 0);
  CHECK(std::string(medchain_status_name(MEDCHAIN_E_VALIDATION)) == "ValidationError");
  CHECK(std::string(medchain_status_name(MEDCHAIN_E_NO_FEASIBLE_CHAIN)) == "NoFeasibleChain");
  medchain_string_free(nullptr);
  medchain_scenario_free(nullptr);
  medchain_session_free(nullptr);
}

TEST_CASE("scenario handles and error codes") {
  medchain_scenario* sc = nullptr;
  CHECK(medchain_scenario_load("no_such_scenario", &sc) == MEDCHAIN_E_IO);
  CHECK(sc == nullptr);
  CHECK(std::strlen(medchain_last_error()) > 0);
  CHECK(medchain_scenario_parse("{", &sc) == MEDCHAIN_E_PARSE);
  CHECK(medchain_scenario_load("mpw2023", nullptr) == MEDCHAIN_E_INVALID_ARGUMENT);

  json doc = json::parse(read_file(std::string(MEDCHAIN_BUNDLED_SCENARIO_DIR) + "/mpw2023.json"));
  doc["watercraft"][0].erase("helipad");
  CHECK(medchain_scenario_parse(doc.dump().c_str(), &sc) == MEDCHAIN_E_VALIDATION);
  CHECK(std::string(medchain_last_error()).find("watercraft[0].helipad") != std::string::npos);

  Scn mpw("mpw2023");
  char* text = nullptr;
  REQUIRE(medchain_scenario_to_json(mpw.p, &text) == MEDCHAIN_OK);
  const std::string once = take(text);
  REQUIRE(medchain_scenario_parse(once.c_str(), &sc) == MEDCHAIN_OK);
  REQUIRE(medchain_scenario_to_json(sc, &text) == MEDCHAIN_OK);
  CHECK(take(text) == once);
  CHECK(medchain_scenario_remove_watercraft(sc, "nope") == MEDCHAIN_E_UNKNOWN_ENTITY);
  CHECK(medchain_scenario_remove_watercraft(sc, "LSV-3") == MEDCHAIN_OK);
  REQUIRE(medchain_scenario_to_json(sc, &text) == MEDCHAIN_OK);
  CHECK(json::parse(take(text))["watercraft"].empty());
  medchain_scenario_free(sc);
}

TEST_CASE("simulate through the C API") {
  Scn mpw("mpw2023");
  const std::string log = simulate(mpw.p, "mcts", 7);
  CHECK(log == read_file(golden_dir() / "mpw2023_seed7.jsonl"));
  CHECK(simulate(mpw.p, "mcts", 7) == log);
  char* metrics = nullptr;
  REQUIRE(medchain_simulate(mpw.p, "greedy", 7, nullptr, nullptr, &metrics) == MEDCHAIN_OK);
  const json m = json::parse(take(metrics));
  CHECK(m["requests"].size() == 1);
  CHECK(m["utilization"].contains("ac1"));
  CHECK(medchain_simulate(mpw.p, "oracle", 7, nullptr, nullptr, nullptr) == MEDCHAIN_E_VALIDATION);
  CHECK(medchain_simulate(mpw.p, "mcts", 7, "{\"iterations\":0}", nullptr, nullptr) == MEDCHAIN_E_VALIDATION);
  CHECK(medchain_simulate(mpw.p, "mcts", 7, "{", nullptr, nullptr) == MEDCHAIN_E_PARSE);

  int ok = 0;
  char* why = nullptr;
  REQUIRE(medchain_replay_check(mpw.p, log.c_str(), &ok, &why) == MEDCHAIN_OK);
  CHECK(ok == 1);
  CHECK(take(why).empty());
  const std::string truncated = log.substr(0, log.find("\n") + 1) + log.substr(log.rfind("{"));
  REQUIRE(medchain_replay_check(mpw.p, truncated.c_str(), &ok, &why) == MEDCHAIN_OK);
  CHECK(ok == 0);
  CHECK_FALSE(take(why).empty());
}

TEST_CASE("planning, zones, chains and placement") {
  Scn mpw("mpw2023");
  char* out = nullptr;
  REQUIRE(medchain_plan_at(mpw.p, 300, "{\"iterations\":200}", &out) == MEDCHAIN_OK);
  const json rec = json::parse(take(out));
  CHECK(rec["action"]["kind"] == "dispatch_via_axp");
  // Before the request arrives only waiting is possible.
  REQUIRE(medchain_plan_at(mpw.p, 0, "{\"iterations\":10}", &out) == MEDCHAIN_OK);
  CHECK(json::parse(take(out))["action"]["kind"] == "hold");

  REQUIRE(medchain_zones(mpw.p, "ac1", "ac2", 0, 3600, 60, &out) == MEDCHAIN_OK);
  const json zones = json::parse(take(out));
  CHECK(zones["type"] == "FeatureCollection");
  CHECK(medchain_zones(mpw.p, "ac1", "nobody", 0, 3600, 60, &out) == MEDCHAIN_E_UNKNOWN_ENTITY);
  CHECK(medchain_zones(mpw.p, "ac1", "ac2", 0, 3600, 0, &out) == MEDCHAIN_E_VALIDATION);

  Scn fig7("fig7_manila_guam");
  REQUIRE(medchain_chain(fig7.p, 14.5995, 120.9842, 13.4443, 144.7937, nullptr, &out) == MEDCHAIN_OK);
  const json chain = json::parse(take(out));
  CHECK(chain["plan"]["axp_watercraft"] == json::array({"transit_vessel"}));
  CHECK(chain["geojson"]["type"] == "FeatureCollection");
  REQUIRE(medchain_scenario_remove_watercraft(fig7.p, "transit_vessel") == MEDCHAIN_OK);
  CHECK(medchain_chain(fig7.p, 14.5995, 120.9842, 13.4443, 144.7937, nullptr, &out) ==
        MEDCHAIN_E_NO_FEASIBLE_CHAIN);
  CHECK(medchain_chain(fig7.p, 95, 0, 0, 0, nullptr, &out) == MEDCHAIN_E_INVALID_ARGUMENT);

  REQUIRE(medchain_place_axp(mpw.p, 3, "{\"horizon_s\":3600}", &out) == MEDCHAIN_OK);
  const json placement = json::parse(take(out));
  REQUIRE(placement["candidates"].size() == 9);
  CHECK(placement["coverage"] == placement["candidates"][placement["index"].get<int>()]["coverage"]);
  CHECK(medchain_place_axp(mpw.p, 0, nullptr, &out) == MEDCHAIN_E_VALIDATION);

  REQUIRE(medchain_bench(mpw.p, "greedy", 2, 1, nullptr, &out) == MEDCHAIN_OK);
  const json bench = json::parse(take(out));
  CHECK(bench["episodes"] == 2);
}

TEST_CASE("sessions through the C API") {
  Scn mpw("mpw2023");
  Sess s(mpw);
  std::vector<std::pair<uint64_t, std::string>> seen;
  auto cb = [](uint64_t rev, const char* payload, void* user) {
    static_cast<std::vector<std::pair<uint64_t, std::string>>*>(user)->emplace_back(rev, payload);
  };
  int token = 0;
  REQUIRE(medchain_session_subscribe(s.p, cb, &seen, &token) == MEDCHAIN_OK);

  call(medchain_session_tick, s.p, {{"to_s", 300}});
  const json state = [&] {
    char* out = nullptr;
    REQUIRE(medchain_session_state(s.p, &out) == MEDCHAIN_OK);
    return json::parse(take(out));
  }();
  CHECK(state["revision"] == 1);
  REQUIRE(state["pending"].size() == 1);

  const json rec = call(medchain_session_recommend, s.p, {{"request_id", "req1"}, {"config", {{"iterations", 200}}}});
  CHECK(rec["revision"] == 1);
  const json what = call(medchain_session_whatif, s.p, {{"request_id", "req1"}, {"forced_axp", "LSV-3"}});
  CHECK(what["action"]["axp_watercraft_id"] == "LSV-3");
  const json ack = call(medchain_session_commit, s.p, {{"action", rec["action"]}});
  CHECK(ack["revision"] == 2);
  call(medchain_session_submit_request, s.p,
       {{"id", "req2"}, {"location", {{"lat", 21.4}, {"lon", -157.9}}}, {"precedence", "routine"},
        {"destination", "tripler"}});
  call(medchain_session_ingest_position, s.p,
       {{"entity_id", "LSV-3"}, {"t_s", 400}, {"position", {{"lat", 21.27}, {"lon", -157.99}}}});
  call(medchain_session_ingest_position, s.p,
       {{"entity_id", "LSV-3"}, {"t_s", 100}, {"position", {{"lat", 21.27}, {"lon", -157.99}}}},
       MEDCHAIN_E_STALE_FIX);
  call(medchain_session_recommend, s.p, {{"request_id", "zzz"}}, MEDCHAIN_E_UNKNOWN_REQUEST);
  call(medchain_session_commit, s.p, {{"kind", "teleport"}}, MEDCHAIN_E_VALIDATION);
  call(medchain_session_tick, s.p, {{"to_s", 0}}, MEDCHAIN_E_VALIDATION);
  call(medchain_session_tick, s.p, json::object(), MEDCHAIN_E_VALIDATION);

  char* out = nullptr;
  CHECK(medchain_session_tick(s.p, "not json", &out) == MEDCHAIN_E_PARSE);
  CHECK(medchain_session_state(nullptr, &out) == MEDCHAIN_E_NO_SESSION);
  REQUIRE(medchain_session_zones(s.p, "ac1", "ac2", 0, 3600, 60, &out) == MEDCHAIN_OK);
  take(out);

  REQUIRE(seen.size() == 4);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    CHECK(seen[i].first == i + 1);
    CHECK(json::parse(seen[i].second)["revision"] == i + 1);
  }
  REQUIRE(medchain_session_unsubscribe(s.p, token) == MEDCHAIN_OK);
  call(medchain_session_tick, s.p, {{"dt_s", 60}});
  CHECK(seen.size() == 4);
}
