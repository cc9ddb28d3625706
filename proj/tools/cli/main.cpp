#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "manifest.hpp"
#include "scenarios.hpp"

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kAborted = 1;
constexpr int kBadConfig = 2;
constexpr int kIoError = 3;

// defaults < config file < --set (in order) < --seed
wwcli::ScenarioConfig resolve(const std::string& path, const std::vector<std::string>& sets, long long seed) {
  wwcli::ScenarioConfig cfg = wwcli::load_config(path);
  for (const std::string& s : sets) wwcli::apply_setting(cfg, s);
  if (seed >= 0) wwcli::apply_setting(cfg, "seed", std::to_string(seed));
  wwcli::validate(cfg);
  return cfg;
}

int run(const std::string& path, const std::vector<std::string>& sets, const std::string& out_dir, long long seed) {
  wwcli::ScenarioConfig cfg;
  try {
    cfg = resolve(path, sets, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadConfig;
  }
  const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path("out") / cfg.scenario : std::filesystem::path(out_dir);
  wwcli::RunOutcome outcome;
  wwcli::ManifestInput mi;
  mi.config = &cfg;
  int status = kOk;
  try {
    std::filesystem::create_directories(dir);
    {
      std::ofstream os(dir / "config.txt", std::ios::binary);
      os << wwcli::serialize(cfg);
      if (!os) throw std::ios_base::failure("cannot write " + (dir / "config.txt").string());
    }
    outcome.files.push_back("config.txt");
    wwcli::run_scenario(cfg, dir, outcome);
    if (outcome.aborted) {
      std::cerr << "run aborted at t = " << outcome.last_good_time << ": " << outcome.abort_reason << '\n';
      status = kAborted;
    }
  } catch (const wwcli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    mi.error = e.what();
    status = kBadConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    mi.error = e.what();
    status = kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    mi.error = e.what();
    status = kIoError;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    mi.error = e.what();
    outcome.aborted = true;
    status = kAborted;
  }
  mi.files = outcome.files;
  mi.aborted = outcome.aborted;
  mi.last_good_time = outcome.last_good_time;
  mi.abort_reason = outcome.abort_reason;
  try {
    wwcli::write_manifest(dir, mi);
  } catch (const std::exception& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  }
  if (status == kOk) std::cout << outcome.summary.dump(2) << '\n';
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral gravity-capillary water-wave lab"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::vector<std::string> sets;
  long long seed = -1;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario and write its artifacts");
  run_cmd->add_option("config", config_path, "key = value config file")->required();
  run_cmd->add_option("--set", sets, "Override one key (key=value); repeatable, applied after the file");
  run_cmd->add_option("--out", out_dir, "Output directory (default out/<scenario>)");
  run_cmd->add_option("--seed", seed, "Seed for randomized suites; overrides the seed key")->check(CLI::NonNegativeNumber);

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a config file without running it");
  validate_cmd->add_option("config", validate_path, "key = value config file")->required();

  auto* list_cmd = app.add_subcommand("list-scenarios", "Print the scenario names");

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd) return run(config_path, sets, out_dir, seed);
  if (*validate_cmd) {
    try {
      const wwcli::ScenarioConfig cfg = resolve(validate_path, {}, -1);
      std::cout << wwcli::serialize(cfg);
      return kOk;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kBadConfig;
    }
  }
  if (*list_cmd) {
    for (const std::string& s : wwcli::scenario_names()) std::cout << s << '\n';
    return kOk;
  }
  return kOk;
}
