#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "noma_aoi/nrt_analysis.hpp"
#include "noma_aoi/system_config.hpp"

namespace noma_aoi {

/// One delivered update of the tracked source, in slot-end indices: the
/// packet was generated at the end of slot `generated - 1` (time generated*T)
/// and decoded at time delivered*T.
struct Delivery {
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
};

struct SimOptions {
  std::int64_t warmup_slots = 0;    // slots excluded from every statistic
  bool record_transitions = false;  // fill SimResult::transitions
  int tracked_source = 0;
};

struct SimResult {
  /// Sum Q_j / sum D_j over deliveries j >= 2; empty when fewer than two
  /// deliveries were observed (AoI undefined).
  std::optional<double> avg_aoi;
  std::vector<Delivery> deliveries;
  std::int64_t success_count = 0;        // deliveries of the tracked source
  std::int64_t buffered_slot_count = 0;  // slots where it held a packet at slot start
  std::int64_t total_deliveries = 0;     // all sources
  int max_deliveries_per_slot = 0;
  std::int64_t slots = 0;
  std::uint64_t seed = 0;
  double slot_duration = 1.0;
  std::vector<std::int64_t> occupancy;    // buffered-count histogram at slot start, size M+1
  std::vector<std::int64_t> transitions;  // row-major (M+1)^2 counts b -> a, if recorded
};

/// Decodes one slot. `levels[n]` is the chosen level (0 = strongest) of
/// active transmitter n; returns per-transmitter success. Levels are decoded
/// top-down and decoding stops at the first level holding two or more users.
std::vector<bool> decode_sic(std::span<const int> levels, int num_levels);

/// Slot-level Monte Carlo of the grant-free NOMA uplink.
SimResult run_simulation(const SystemConfig& cfg, Scheme scheme, std::int64_t slots,
                         std::uint64_t seed, const SimOptions& options = {});

/// Average AoI from a delivery log (time units = slots * slot_duration).
std::optional<double> average_aoi_from_deliveries(std::span<const Delivery> deliveries,
                                                  double slot_duration);

struct ReplicationSummary {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::vector<std::optional<double>> per_rep;  // indexed by replication
  int zero_delivery_reps = 0;

  bool complete() const { return zero_delivery_reps == 0; }
};

/// Independent replications with seeds base_seed + r, run concurrently.
/// mean/stderr use only replications that produced an AoI.
ReplicationSummary run_replications(const SystemConfig& cfg, Scheme scheme, std::int64_t slots,
                                    std::uint64_t base_seed, int reps,
                                    const SimOptions& options = {});

/// Frequency of the number of buffered sources at slot start under retransmission.
std::vector<double> empirical_state_occupancy(const SystemConfig& cfg, std::int64_t slots,
                                              std::uint64_t seed);

/// CSV with columns j,t_j,t'_j,D_j,S_j,Q_j (times scaled by slot_duration).
void write_delivery_csv(std::ostream& out, const SimResult& result);

}  // namespace noma_aoi
