#pragma once

#include <functional>
#include <stdexcept>

#include "noma_aoi/system_config.hpp"

namespace noma_aoi {

enum class Scheme { Nrt, Rt };

const char* scheme_name(Scheme scheme);

/// Closed-form quantities for the no-retransmission scheme. Times are in the
/// units of SystemConfig::slot_duration.
struct NrtResult {
  double success_prob = 0.0;            // per-slot success probability of user 1
  double mean_interval = 0.0;           // E{D}
  double second_moment_interval = 0.0;  // E{D^2}
  double mean_system_time = 0.0;        // E{S}, always one slot
  double avg_aoi = 0.0;
};

/// Per-slot probability that user 1 completes a status update when buffers
/// are flushed every slot.
double success_prob_nrt(const SnrLadder& ladder, const SystemConfig& cfg);

/// Geometric inter-delivery moments and AoI for a given per-slot success
/// probability.
NrtResult nrt_result_from_success(double success_prob, double slot_duration);

NrtResult average_aoi_nrt(const SystemConfig& cfg);

/// Signalled when the two-level optimum equation has no sign change on its
/// bracket (small M); callers fall back to ptx_grid_argmin.
class BracketFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Large-M stationarity condition of the two-level success probability,
/// written in eta = lambda * M * q1 * bar_p_tx.
double corollary1_objective(double eta, double q1);

struct EtaBracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Interval guaranteed to contain the root of corollary1_objective: between 1
/// (where the single-level factor vanishes) and the positive root of
/// eta^2 - (2 q1 - 1) eta - q1 (where the quadratic factor vanishes).
EtaBracket corollary1_bracket(double q1);

struct OptimalPtx {
  double p_tx = 0.0;      // recommended attempt probability, clamped to (0, 1]
  double bar_p_tx = 0.0;  // effective activation probability at the optimum
  double eta = 0.0;
  bool clamped = false;   // unconstrained optimum exceeded 1
};

/// Asymptotic (M -> infinity) optimal attempt probability for K = 2, using the
/// effective level distribution of the configured ladder.
OptimalPtx optimal_ptx_nrt_k2(const SystemConfig& cfg);

/// Arg-min over {step, 2 step, ...} <= 1 of `aoi_of_ptx`; ties go to the
/// smaller P_TX and non-finite values are skipped.
double ptx_grid_argmin(const std::function<double(double)>& aoi_of_ptx, double step);

/// Arg-min of the scheme's analytical average AoI over the P_TX grid.
double ptx_grid_argmin(const SystemConfig& cfg, Scheme scheme, double step);

/// Analytical average AoI of either scheme.
double average_aoi(const SystemConfig& cfg, Scheme scheme);

}  // namespace noma_aoi
