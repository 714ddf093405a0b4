#include "noma_aoi/system_config.hpp"

#include <cmath>
#include <numeric>

namespace noma_aoi {

namespace {

constexpr double kNormalizationTol = 1e-12;

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

bool in_unit_interval(double x) { return x > 0.0 && x <= 1.0; }

}  // namespace

InvalidConfig::InvalidConfig(const std::vector<std::string>& violations)
    : std::invalid_argument("invalid configuration: " + join(violations)),
      violations_(violations) {}

std::vector<double> uniform_q(int num_levels) {
  if (num_levels <= 0) return {};
  return std::vector<double>(static_cast<std::size_t>(num_levels), 1.0 / num_levels);
}

std::vector<std::string> validate_config(const SystemConfig& cfg) {
  std::vector<std::string> v;
  if (cfg.num_sources < 1) v.emplace_back("M must be >= 1");
  if (cfg.num_levels < 1) v.emplace_back("K must be >= 1");
  if (!in_unit_interval(cfg.lambda)) v.emplace_back("lambda must be in (0,1]");
  if (!in_unit_interval(cfg.p_tx)) v.emplace_back("p_tx must be in (0,1]");
  if (cfg.num_levels >= 1 && cfg.q.size() != static_cast<std::size_t>(cfg.num_levels)) {
    v.emplace_back("q must have K entries");
  }
  bool negative = false;
  for (double qk : cfg.q) negative = negative || !(qk >= 0.0);
  if (negative) v.emplace_back("q entries must be >= 0");
  const double total = std::accumulate(cfg.q.begin(), cfg.q.end(), 0.0);
  if (!(std::abs(total - 1.0) <= kNormalizationTol)) v.emplace_back("q must sum to 1");
  if (!(cfg.power_budget > 0.0)) v.emplace_back("power_budget must be positive");
  if (!(cfg.rate > 0.0) || std::isinf(cfg.rate)) v.emplace_back("rate must be positive and finite");
  if (!(cfg.slot_duration > 0.0) || std::isinf(cfg.slot_duration)) {
    v.emplace_back("slot_duration must be positive and finite");
  }
  return v;
}

void require_valid(const SystemConfig& cfg) {
  auto violations = validate_config(cfg);
  if (!violations.empty()) throw InvalidConfig(violations);
}

SnrLadder configure_snr_ladder(const SystemConfig& cfg) {
  require_valid(cfg);
  const auto K = static_cast<std::size_t>(cfg.num_levels);
  SnrLadder ladder;
  ladder.levels.resize(K);

  // Bottom level decodes against noise only; each level above must decode
  // while the M-1 other sources could all sit on the next level down.
  const double base = std::expm1(cfg.rate * std::log(2.0));
  ladder.levels[K - 1] = base;
  for (std::size_t k = K - 1; k-- > 0;) {
    ladder.levels[k] = base * (1.0 + (cfg.num_sources - 1) * ladder.levels[k + 1]);
  }

  std::vector<double> weights(K);
  for (std::size_t k = 0; k < K; ++k) {
    weights[k] = cfg.q[k] * std::exp(-ladder.levels[k] / cfg.power_budget);
  }
  ladder.feasible_fraction = std::accumulate(weights.begin(), weights.end(), 0.0);
  ladder.bar_p_tx = cfg.p_tx * ladder.feasible_fraction;
  ladder.bar_q.resize(K);
  if (ladder.feasible_fraction > 0.0) {
    for (std::size_t k = 0; k < K; ++k) ladder.bar_q[k] = weights[k] / ladder.feasible_fraction;
  } else {
    // No level is ever affordable; bar_p_tx = 0 marks the scenario degenerate.
    ladder.bar_q = cfg.q;
  }
  return ladder;
}

double attempt_prob_for_effective(const SnrLadder& ladder, double bar_p_tx) {
  if (!(ladder.feasible_fraction > 0.0)) throw DegenerateConfig("no SNR level is power-feasible");
  return bar_p_tx / ladder.feasible_fraction;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace noma_aoi
