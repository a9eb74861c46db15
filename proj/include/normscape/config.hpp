#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "normscape/abm.hpp"
#include "normscape/meanfield.hpp"
#include "normscape/sensitivity.hpp"

namespace normscape {

using Json = nlohmann::ordered_json;

// A parsed config file. When the file is a run manifest, `config` is its embedded config and
// `seed` its recorded seed.
struct ConfigDocument {
  Json config;
  std::optional<std::uint64_t> seed;
  std::string text;  // raw source, used to attach line numbers to field errors
  std::string origin;
};

ConfigDocument parse_config_text(const std::string& text, const std::string& origin = "<config>");
ConfigDocument load_config_file(const std::filesystem::path& path);

// Fraction of QRE solves allowed to fall back on the last iterate before a run is reported as
// a numerical failure.
inline constexpr double kDefaultFailureBudget = 0.25;

struct LandscapeRunConfig {
  UtilityModel family = UtilityModel::risk_neutral();
  TraitDistributions traits;
  GridSpec grid;
  LandscapeOptions options;
  double failure_budget = kDefaultFailureBudget;
  std::vector<std::pair<double, double>> waypoints;  // (mu_eta, mu_lambda), trajectory only
};

struct AbmRunConfig {
  SimConfig sim;
  double failure_budget = kDefaultFailureBudget;
  bool write_agents = true;
};

struct SweepRunConfig {
  SimConfig base;
  SweepSpec spec;
  std::size_t max_jobs = 0;
};

// All parsers reject unknown fields and wrongly typed values with ConfigError.
LandscapeRunConfig parse_landscape_config(const ConfigDocument& doc, bool require_waypoints);
AbmRunConfig parse_abm_config(const ConfigDocument& doc);
SweepRunConfig parse_sweep_config(const ConfigDocument& doc);

Json to_json(const LandscapeRunConfig& c, bool include_waypoints);
Json to_json(const AbmRunConfig& c);
Json to_json(const SweepRunConfig& c);

struct RunManifest {
  std::string command;
  Json config;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;
};

Json to_json(const RunManifest& m);

}  // namespace normscape
