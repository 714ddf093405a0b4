#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "noma_aoi/system_config.hpp"

namespace noma_aoi {

class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Partially specified scenario, as read from a file or from command-line
/// flags. Unset fields fall through to the next layer.
struct ScenarioSpec {
  std::optional<int> m;
  std::optional<int> k;
  std::optional<double> lambda;
  std::optional<double> p_tx;
  std::optional<std::string> q;  // "uniform" or comma-separated list
  std::optional<double> power_db;
  std::optional<double> rate;
  std::optional<double> slot_duration;

  /// Fields set in `over` replace those in *this.
  ScenarioSpec& overlay(const ScenarioSpec& over);
};

/// Flat `key = value` document; `#` starts a comment. Keys: m, k, lambda,
/// p_tx, q, power_db, rate, slot_duration. Unknown keys are errors.
ScenarioSpec parse_scenario(std::istream& in);
ScenarioSpec load_scenario_file(const std::string& path);

/// "uniform" or "v1,v2,...". Throws ConfigParseError on malformed input.
std::vector<double> parse_q(const std::string& text, int num_levels);

/// Resolves a spec on top of `defaults`; power_db converts to linear here.
SystemConfig to_system_config(const ScenarioSpec& spec, const SystemConfig& defaults);

}  // namespace noma_aoi
