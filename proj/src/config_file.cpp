#include "noma_aoi/config_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace noma_aoi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigParseError("'" + key + "': expected a number, got '" + value + "'");
  }
  if (used != value.size()) throw ConfigParseError("'" + key + "': trailing characters in '" + value + "'");
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ConfigParseError("'" + key + "': expected an integer, got '" + value + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

ScenarioSpec& ScenarioSpec::overlay(const ScenarioSpec& over) {
  if (over.m) m = over.m;
  if (over.k) k = over.k;
  if (over.lambda) lambda = over.lambda;
  if (over.p_tx) p_tx = over.p_tx;
  if (over.q) q = over.q;
  if (over.power_db) power_db = over.power_db;
  if (over.rate) rate = over.rate;
  if (over.slot_duration) slot_duration = over.slot_duration;
  return *this;
}

ScenarioSpec parse_scenario(std::istream& in) {
  ScenarioSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigParseError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    try {
      if (key == "m") spec.m = to_int(key, value);
      else if (key == "k") spec.k = to_int(key, value);
      else if (key == "lambda") spec.lambda = to_double(key, value);
      else if (key == "p_tx") spec.p_tx = to_double(key, value);
      else if (key == "q") spec.q = value;
      else if (key == "power_db") spec.power_db = to_double(key, value);
      else if (key == "rate") spec.rate = to_double(key, value);
      else if (key == "slot_duration") spec.slot_duration = to_double(key, value);
      else throw ConfigParseError("unknown key '" + key + "'");
    } catch (const ConfigParseError& e) {
      throw ConfigParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return spec;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

std::vector<double> parse_q(const std::string& text, int num_levels) {
  const std::string t = trim(text);
  if (t == "uniform") return uniform_q(num_levels);
  std::vector<double> q;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) q.push_back(to_double("q", trim(item)));
  if (q.empty()) throw ConfigParseError("'q': empty list");
  return q;
}

SystemConfig to_system_config(const ScenarioSpec& spec, const SystemConfig& defaults) {
  SystemConfig cfg = defaults;
  if (spec.m) cfg.num_sources = *spec.m;
  if (spec.k) cfg.num_levels = *spec.k;
  if (spec.lambda) cfg.lambda = *spec.lambda;
  if (spec.p_tx) cfg.p_tx = *spec.p_tx;
  if (spec.power_db) cfg.power_budget = db_to_linear(*spec.power_db);
  if (spec.rate) cfg.rate = *spec.rate;
  if (spec.slot_duration) cfg.slot_duration = *spec.slot_duration;
  if (spec.q) {
    cfg.q = parse_q(*spec.q, cfg.num_levels);
  } else if (spec.k && cfg.q.size() != static_cast<std::size_t>(cfg.num_levels)) {
    cfg.q = uniform_q(cfg.num_levels);
  }
  return cfg;
}

}  // namespace noma_aoi
