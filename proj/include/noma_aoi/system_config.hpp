#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace noma_aoi {

/// Thrown when a scenario violates one of the SystemConfig invariants.
class InvalidConfig : public std::invalid_argument {
 public:
  explicit InvalidConfig(const std::vector<std::string>& violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Thrown when a valid-looking scenario makes the average AoI unbounded,
/// e.g. no packet ever arrives or no transmission is ever power-feasible.
class DegenerateConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full scenario parameterization. All quantities are linear scale; dB
/// conversion happens only at the command-line boundary.
struct SystemConfig {
  int num_sources = 1;           // M
  int num_levels = 1;            // K
  double lambda = 0.5;           // per-slot arrival probability
  double p_tx = 0.5;             // attempted transmission probability
  std::vector<double> q{1.0};    // level-selection distribution, size K
  double power_budget = 100.0;   // P, linear; +inf means unconstrained
  double rate = 0.2;             // R, bits/s/Hz
  double slot_duration = 1.0;    // T
};

std::vector<double> uniform_q(int num_levels);

/// Returns every violated invariant as a human-readable message; empty when valid.
std::vector<std::string> validate_config(const SystemConfig& cfg);

/// Throws InvalidConfig when validate_config reports anything.
void require_valid(const SystemConfig& cfg);

/// Descending received-SNR targets and the access probabilities after
/// marginalizing the power-feasibility test.
struct SnrLadder {
  std::vector<double> levels;   // P_1 > ... > P_K, linear SNR
  double bar_p_tx = 0.0;        // effective activation probability
  std::vector<double> bar_q;    // effective level distribution given activation
  double feasible_fraction = 0.0;  // sum_k q_k exp(-levels[k]/P)
};

SnrLadder configure_snr_ladder(const SystemConfig& cfg);

/// Inverse of the activation-probability map: the attempt probability that
/// yields `bar_p_tx` for this ladder. Not clamped.
double attempt_prob_for_effective(const SnrLadder& ladder, double bar_p_tx);

double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace noma_aoi
