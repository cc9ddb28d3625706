#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"
#include "wwlab/waterwaves.hpp"

namespace wwcli {

struct RunOutcome {
  nlohmann::ordered_json summary;
  std::vector<std::string> files;  // relative to the output directory
  bool aborted = false;
  double last_good_time = 0.0;
  std::string abort_reason;
};

// Initial surface from eta_modes / eta_file (likewise psi); empty means zero.
wwlab::SurfaceState initial_state(const ScenarioConfig& cfg);
wwlab::DnOptions dn_options(const ScenarioConfig& cfg);
wwlab::EvolveOptions evolve_options(const ScenarioConfig& cfg);

// Validates, runs, and writes the scenario artifacts (CSV files and
// summary.json) into `dir`. Does not write the manifest. Files written before
// an exception are already listed in `out`.
void run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& dir, RunOutcome& out);
RunOutcome run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& dir);

}  // namespace wwcli
