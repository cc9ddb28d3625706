#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wwlab/spectral.hpp"

namespace wwcli {

// A validation failure tied to a config key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& msg)
      : std::runtime_error("config key '" + key + "': " + msg), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// amplitude * cos(k x + l y + phase)
struct Mode {
  int k = 0;
  int l = 0;
  double amplitude = 0.0;
  double phase = 0.0;
  bool operator==(const Mode&) const = default;
};

const std::vector<std::string>& scenario_names();

struct ScenarioConfig {
  std::string scenario = "conservation";
  int dim = 1;
  int n = 128;
  int m = 0;  // strip levels; 0 means M = N
  double gravity = 1.0;
  double depth = 1.0;
  double dt = 1e-3;
  double duration = 1.0;
  bool dealias = true;
  std::string kinetic = "closed_form";    // closed_form | discrete_gradient
  std::string straightening = "linear";  // linear | smoothing
  double cfl = 1.0;
  double sample_interval = 0.0;
  double s = 0.0;  // 0: module default
  double r = 2.1;
  double eps = 0.1;
  double eps_star = 0.1;
  int stride = 1;
  std::vector<Mode> eta_modes;
  std::vector<Mode> psi_modes;
  std::string eta_file;
  std::string psi_file;
  unsigned long long seed = 12345;
  double delta = 1e-4;
  Mode delta_mode{3, 0, 1.0, 0.0};
  double periods = 10.0;
  int probe_samples = 4;

  bool operator==(const ScenarioConfig&) const = default;
};

// "key = value" lines, '#' starts a comment. Unknown keys and malformed
// values throw ConfigError.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
// Applies one "key=value" override.
void apply_setting(ScenarioConfig& cfg, const std::string& assignment);
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);
// Re-checks every module precondition that can be checked before running.
void validate(const ScenarioConfig& cfg);
// Canonical text; parse_config(serialize(c)) == c.
std::string serialize(const ScenarioConfig& cfg);
std::map<std::string, std::string> as_map(const ScenarioConfig& cfg);

std::string format_modes(const std::vector<Mode>& modes);
std::vector<Mode> parse_modes(const std::string& key, const std::string& text);

wwlab::SpectralField field_from_modes(const wwlab::Grid& grid, const std::vector<Mode>& modes);

}  // namespace wwcli
