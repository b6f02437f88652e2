#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "medchain/world.hpp"

namespace medchain {

inline constexpr int kSchemaVersion = 1;

// A scenario held in SI units. The declared units only affect how the file is
// written back out.
struct Scenario {
  int schema_version = kSchemaVersion;
  std::string id;
  std::string distance_unit = "m";  // "mi_statute" | "nmi" | "m"
  std::string speed_unit = "mps";   // "kn" | "mps"
  ServiceConfig service;
  std::vector<Aircraft> aircraft;
  std::vector<Watercraft> watercraft;
  std::vector<TreatmentFacility> facilities;
  std::vector<EvacRequest> requests;
};

Scenario parse_scenario(std::string_view json_text);
std::string serialize_scenario(const Scenario& sc);

// Accepts a file path or a bundled id ("mpw2023", "fig7_manila_guam", "oahu_kauai").
// Ids are looked up in $MEDCHAIN_SCENARIO_DIR first, then the bundled directory.
Scenario load_scenario(const std::string& path_or_id);
std::filesystem::path resolve_scenario_path(const std::string& path_or_id);
std::filesystem::path bundled_scenario_dir();

void validate(const Scenario& sc);

WorldState initial_state(const Scenario& sc);

}  // namespace medchain
