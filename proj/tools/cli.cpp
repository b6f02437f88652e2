#include "cli.hpp"

#include <csignal>
#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "medchain/medchain.h"
#include "server.hpp"

namespace medchain::tools {

namespace {

using nlohmann::ordered_json;

int exit_code(medchain_status st) {
  switch (st) {
    case MEDCHAIN_OK: return kExitOk;
    case MEDCHAIN_E_PARSE:
    case MEDCHAIN_E_VALIDATION:
    case MEDCHAIN_E_UNKNOWN_ENTITY:
    case MEDCHAIN_E_UNKNOWN_REQUEST:
    case MEDCHAIN_E_IO:
    case MEDCHAIN_E_INVALID_ARGUMENT:
    case MEDCHAIN_E_STALE_FIX:
    case MEDCHAIN_E_UNDEFINED_BEARING: return kExitInvalid;
    case MEDCHAIN_E_NO_FEASIBLE_CHAIN:
    case MEDCHAIN_E_INFEASIBLE:
    case MEDCHAIN_E_TERMINAL_STATE:
    case MEDCHAIN_E_ILLEGAL_ACTION: return kExitInfeasible;
    case MEDCHAIN_E_NO_SESSION:
    case MEDCHAIN_E_INTERNAL: return kExitInternal;
  }
  return kExitInternal;
}

struct Failure {
  medchain_status status;
};

// Owns C API strings and scenarios for the life of one command.
class Ctx {
 public:
  Ctx(std::ostream& out, std::ostream& err) : out(out), err(err) {}
  ~Ctx() {
    medchain_scenario_free(sc);
    for (char* s : strings_) medchain_string_free(s);
  }

  void check(medchain_status st) {
    if (st == MEDCHAIN_OK) return;
    err << "error: " << medchain_status_name(st) << ": " << medchain_last_error() << "\n";
    throw Failure{st};
  }

  void load(const std::string& id) { check(medchain_scenario_load(id.c_str(), &sc)); }

  char** slot() {
    strings_.push_back(nullptr);
    return &strings_.back();
  }

  std::ostream& out;
  std::ostream& err;
  medchain_scenario* sc = nullptr;

 private:
  std::deque<char*> strings_;
};

void write_file(Ctx& ctx, const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    ctx.err << "error: IoError: cannot write " << path << "\n";
    throw Failure{MEDCHAIN_E_IO};
  }
  f << text;
}

void emit(Ctx& ctx, const std::string& json_text, const std::string& out_path) {
  if (out_path.empty()) {
    ctx.out << ordered_json::parse(json_text).dump(2) << "\n";
  } else {
    write_file(ctx, out_path, json_text);
  }
}

struct PlannerFlags {
  int iterations = 1000;
  int workers = 1;
  int depth = 30;
  double exploration_c = 1.4;
  bool stochastic = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--iterations", iterations, "MCTS iterations per decision")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", workers, "root-parallel MCTS workers")->check(CLI::PositiveNumber);
    cmd->add_option("--depth", depth, "rollout depth cap")->check(CLI::NonNegativeNumber);
    cmd->add_option("--exploration-c", exploration_c, "UCT exploration constant");
    cmd->add_flag("--stochastic", stochastic, "sample service-time noise in planner rollouts");
  }

  std::string json(std::uint64_t seed) const {
    return ordered_json{{"iterations", iterations},
                        {"workers", workers},
                        {"max_rollout_depth", depth},
                        {"exploration_c", exploration_c},
                        {"seed", seed},
                        {"stochastic", stochastic}}
        .dump();
  }
};

// Parses "LAT,LON".
struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

std::string parse_latlon(const std::string& text, LatLon& p) {
  std::istringstream in(text);
  char comma = 0;
  if (!(in >> p.lat >> comma >> p.lon) || comma != ',' || !(in >> std::ws).eof()) {
    return "expected LAT,LON but got '" + text + "'";
  }
  return {};
}

int serve_forever(Ctx& ctx, const std::string& host, int port, const std::string& scenario) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  OpsServer server;
  if (!scenario.empty()) {
    std::string error;
    const medchain_status st = server.open_session(scenario, &error);
    if (st != MEDCHAIN_OK) {
      ctx.err << "error: " << medchain_status_name(st) << ": " << error << "\n";
      return exit_code(st);
    }
  }
  const int bound = server.bind(host, port);
  if (bound < 0) {
    ctx.err << "error: cannot bind " << host << ":" << port << "\n";
    return kExitInternal;
  }
  ctx.out << "listening on http://" << host << ":" << bound << "\n" << std::flush;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  const bool ok = server.listen();
  // Wake the waiter if listen ended on its own.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return ok ? kExitOk : kExitInternal;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maritime medical-evacuation planning engine", "medchain"};
  app.require_subcommand(1);
  app.set_version_flag("--version", medchain_version());

  std::string scenario;
  std::string out_path;
  std::uint64_t seed = 0;
  PlannerFlags planner;

  auto* simulate = app.add_subcommand("simulate", "run one episode and write the JSON Lines event log");
  std::string policy = "mcts";
  std::string metrics_path;
  simulate->add_option("scenario", scenario, "scenario id or path")->required();
  simulate->add_option("--policy", policy, "dispatch policy")->check(CLI::IsMember({"mcts", "greedy"}));
  simulate->add_option("--seed", seed, "episode seed");
  simulate->add_option("--out", out_path, "event log path (default: standard output)");
  simulate->add_option("--metrics", metrics_path, "metrics JSON path");
  planner.attach(simulate);

  auto* plan = app.add_subcommand("plan", "recommend the next dispatch at time T");
  double at_s = 0.0;
  plan->add_option("scenario", scenario, "scenario id or path")->required();
  plan->add_option("--at", at_s, "scenario time in seconds")->required()->check(CLI::NonNegativeNumber);
  plan->add_option("--seed", seed, "planner seed");
  planner.attach(plan);

  auto* zones = app.add_subcommand("zones", "opportunity zone, windows and blackouts as GeoJSON");
  std::vector<std::string> pair;
  double t0 = 0.0, t1 = 24.0 * 3600.0, dt = 300.0;
  zones->add_option("scenario", scenario, "scenario id or path")->required();
  zones->add_option("--pair", pair, "two aircraft ids")->required()->expected(2);
  zones->add_option("--t0", t0, "window start (s)");
  zones->add_option("--t1", t1, "window end (s)");
  zones->add_option("--dt", dt, "sampling step (s)")->check(CLI::PositiveNumber);
  zones->add_option("--out", out_path, "GeoJSON path (default: standard output)");

  auto* chain = app.add_subcommand("chain", "earliest-arrival evacuation chain");
  std::string from_text, to_text;
  std::vector<std::string> exclude;
  double horizon = 48.0 * 3600.0, chain_dt = 300.0;
  chain->add_option("scenario", scenario, "scenario id or path")->required();
  chain->add_option("--from", from_text, "pickup LAT,LON")->required();
  chain->add_option("--to", to_text, "destination LAT,LON")->required();
  chain->add_option("--exclude", exclude, "watercraft ids to remove first");
  chain->add_option("--t0", t0, "earliest launch (s)");
  chain->add_option("--horizon", horizon, "search horizon (s)")->check(CLI::PositiveNumber);
  chain->add_option("--dt", chain_dt, "time grid (s)")->check(CLI::PositiveNumber);
  chain->add_option("--out", out_path, "plan GeoJSON path");

  auto* place = app.add_subcommand("place-axp", "grid search for a dedicated AXP position");
  int grid = 5;
  double place_horizon = 24.0 * 3600.0, place_dt = 3600.0;
  place->add_option("scenario", scenario, "scenario id or path")->required();
  place->add_option("--grid", grid, "candidates per side")->required()->check(CLI::PositiveNumber);
  place->add_option("--horizon", place_horizon, "demand horizon (s)")->check(CLI::PositiveNumber);
  place->add_option("--dt", place_dt, "demand instant spacing (s)")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "metric summary over seeded episodes");
  int episodes = 10;
  bench->add_option("scenario", scenario, "scenario id or path")->required();
  bench->add_option("--episodes", episodes, "episode count")->required()->check(CLI::PositiveNumber);
  bench->add_option("--policy", policy, "dispatch policy")->check(CLI::IsMember({"mcts", "greedy"}));
  bench->add_option("--seed", seed, "base seed");
  planner.attach(bench);

  auto* replay = app.add_subcommand("replay-check", "validate an event log against a scenario");
  std::string log_path;
  replay->add_option("scenario", scenario, "scenario id or path")->required();
  replay->add_option("log", log_path, "JSON Lines event log")->required();

  auto* serve = app.add_subcommand("serve", "HTTP/WebSocket operations service");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port, "listen port")->envname("MEDCHAIN_PORT")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "listen address");
  serve->add_option("--scenario", scenario, "open a session on this scenario at startup");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  Ctx ctx(out, err);
  try {
    if (simulate->parsed()) {
      ctx.load(scenario);
      char** log = ctx.slot();
      char** metrics = ctx.slot();
      ctx.check(medchain_simulate(ctx.sc, policy.c_str(), seed, planner.json(seed).c_str(), log, metrics));
      if (out_path.empty()) {
        out << *log;
      } else {
        write_file(ctx, out_path, *log);
        if (metrics_path.empty()) out << ordered_json::parse(*metrics).dump(2) << "\n";
      }
      if (!metrics_path.empty()) write_file(ctx, metrics_path, *metrics);
    } else if (plan->parsed()) {
      ctx.load(scenario);
      char** rec = ctx.slot();
      ctx.check(medchain_plan_at(ctx.sc, at_s, planner.json(seed).c_str(), rec));
      emit(ctx, *rec, "");
    } else if (zones->parsed()) {
      ctx.load(scenario);
      char** geo = ctx.slot();
      ctx.check(medchain_zones(ctx.sc, pair[0].c_str(), pair[1].c_str(), t0, t1, dt, geo));
      emit(ctx, *geo, out_path);
    } else if (chain->parsed()) {
      LatLon from, to;
      for (auto [text, p] : {std::pair{&from_text, &from}, std::pair{&to_text, &to}}) {
        if (auto problem = parse_latlon(*text, *p); !problem.empty()) {
          err << "error: " << problem << "\n";
          return kExitUsage;
        }
      }
      ctx.load(scenario);
      for (const auto& id : exclude) ctx.check(medchain_scenario_remove_watercraft(ctx.sc, id.c_str()));
      const std::string opts = ordered_json{{"t0_s", t0}, {"horizon_s", horizon}, {"dt_s", chain_dt}}.dump();
      char** result = ctx.slot();
      ctx.check(medchain_chain(ctx.sc, from.lat, from.lon, to.lat, to.lon, opts.c_str(), result));
      const auto doc = ordered_json::parse(*result);
      out << doc.at("plan").dump(2) << "\n";
      if (!out_path.empty()) write_file(ctx, out_path, doc.at("geojson").dump());
    } else if (place->parsed()) {
      ctx.load(scenario);
      const std::string opts = ordered_json{{"horizon_s", place_horizon}, {"dt_s", place_dt}}.dump();
      char** result = ctx.slot();
      ctx.check(medchain_place_axp(ctx.sc, grid, opts.c_str(), result));
      emit(ctx, *result, "");
    } else if (bench->parsed()) {
      ctx.load(scenario);
      char** result = ctx.slot();
      ctx.check(medchain_bench(ctx.sc, policy.c_str(), episodes, seed, planner.json(seed).c_str(), result));
      emit(ctx, *result, "");
    } else if (replay->parsed()) {
      ctx.load(scenario);
      std::ifstream f(log_path, std::ios::binary);
      if (!f) {
        err << "error: IoError: cannot read " << log_path << "\n";
        return kExitInvalid;
      }
      std::stringstream text;
      text << f.rdbuf();
      int ok = 0;
      char** violation = ctx.slot();
      ctx.check(medchain_replay_check(ctx.sc, text.str().c_str(), &ok, violation));
      if (!ok) {
        out << "violation: " << *violation << "\n";
        return kExitReplay;
      }
      out << "ok\n";
    } else if (serve->parsed()) {
      return serve_forever(ctx, host, port, scenario);
    }
  } catch (const Failure& f) {
    return exit_code(f.status);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace medchain::tools
