#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "medchain/scenario.hpp"
#include "medchain/smdp.hpp"

namespace medchain::testing {

// Two aircraft, two requests, no watercraft. The routine request is up at t=0
// near base A; an urgent one follows at t=600 also near A, so the best first
// move is to send the far aircraft B and keep A for the urgent call.
Scenario toy_scenario();

// State at the first decision epoch of a scenario.
WorldState first_epoch(const Scenario& sc);

// Exhaustive search of the deterministic decision tree. Chance nodes are
// degenerate (service times are exact), so expectimax reduces to a max over
// every action sequence.
struct ExpectimaxResult {
  std::vector<DispatchAction> root_actions;
  std::vector<double> root_values;
  double value = 0.0;
  std::vector<DispatchAction> argmax;  // every root action within 1e-9 of the best value
  int depth = 0;                       // longest decision sequence
  long nodes = 0;
};
ExpectimaxResult expectimax(const WorldState& s);

// Fixed randomized suite: small island-hopping scenarios with 2-3 aircraft,
// 1-2 watercraft and 3-4 requests, deterministic service.
std::vector<Scenario> random_suite(std::uint64_t seed, int count);
inline constexpr std::uint64_t kSuiteSeed = 20230715;

// Relaxed reachability for static fleets: drops timing, hover fuel and the
// return-home rule after hand-offs and delivery. Any real chain is also
// reachable here, so `false` proves that no chain exists.
bool relaxed_reachable(const GeoPoint& pickup, const GeoPoint& dest, const std::vector<Watercraft>& fleet,
                       const std::vector<Aircraft>& pool);

// Scenario with no entities at all.
Scenario empty_scenario();

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);
// Fresh directory under the system temp dir, unique per call.
std::filesystem::path scratch_dir(const std::string& tag);

// Directory holding frozen golden files.
std::filesystem::path golden_dir();

}  // namespace medchain::testing
