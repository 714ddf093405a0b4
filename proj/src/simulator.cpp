#include "noma_aoi/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "noma_aoi/counter_rng.hpp"

namespace noma_aoi {

namespace {

// Draw indices within one (node, slot) cell.
enum Draw : std::uint64_t { kAttempt = 0, kLevel = 1, kChannel = 2, kArrival = 3 };

struct NodeState {
  bool buffered = false;
  std::int64_t generated = 0;
};

// Top-down SIC: the first level with two or more users blocks itself and
// every weaker level. Writes per-transmitter success into `ok`.
int decode_into(std::span<const int> levels, std::vector<int>& occupancy, std::vector<bool>& ok) {
  std::fill(occupancy.begin(), occupancy.end(), 0);
  for (int k : levels) ++occupancy[static_cast<std::size_t>(k)];
  int blocked_from = static_cast<int>(occupancy.size());
  for (std::size_t k = 0; k < occupancy.size(); ++k) {
    if (occupancy[k] >= 2) {
      blocked_from = static_cast<int>(k);
      break;
    }
  }
  ok.assign(levels.size(), false);
  int delivered = 0;
  for (std::size_t n = 0; n < levels.size(); ++n) {
    if (levels[n] < blocked_from) {
      ok[n] = true;
      ++delivered;
    }
  }
  return delivered;
}

int pick_level(double u, const std::vector<double>& cumulative, int last_nonzero) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const int k = static_cast<int>(it - cumulative.begin());
  return std::min(k, last_nonzero);
}

}  // namespace

std::vector<bool> decode_sic(std::span<const int> levels, int num_levels) {
  if (num_levels < 1) throw std::invalid_argument("decode_sic: num_levels must be >= 1");
  for (int k : levels) {
    if (k < 0 || k >= num_levels) throw std::out_of_range("decode_sic: level index out of range");
  }
  std::vector<int> occupancy(static_cast<std::size_t>(num_levels));
  std::vector<bool> ok;
  decode_into(levels, occupancy, ok);
  return ok;
}

std::optional<double> average_aoi_from_deliveries(std::span<const Delivery> deliveries,
                                                  double slot_duration) {
  if (deliveries.size() < 2) return std::nullopt;
  double area = 0.0;
  double span = 0.0;
  for (std::size_t j = 1; j < deliveries.size(); ++j) {
    const auto d = static_cast<double>(deliveries[j].delivered - deliveries[j - 1].delivered);
    const auto s_prev = static_cast<double>(deliveries[j - 1].delivered - deliveries[j - 1].generated);
    area += d * s_prev + 0.5 * d * d;
    span += d;
  }
  return slot_duration * area / span;
}

SimResult run_simulation(const SystemConfig& cfg, Scheme scheme, std::int64_t slots,
                         std::uint64_t seed, const SimOptions& options) {
  if (slots < 1) throw std::invalid_argument("run_simulation: slots must be >= 1");
  const SnrLadder ladder = configure_snr_ladder(cfg);
  const int M = cfg.num_sources;
  const int K = cfg.num_levels;
  if (options.tracked_source < 0 || options.tracked_source >= M) {
    throw std::invalid_argument("run_simulation: tracked_source out of range");
  }

  std::vector<double> cumulative(static_cast<std::size_t>(K));
  double acc = 0.0;
  int last_nonzero = 0;
  for (int k = 0; k < K; ++k) {
    acc += cfg.q[static_cast<std::size_t>(k)];
    cumulative[static_cast<std::size_t>(k)] = acc;
    if (cfg.q[static_cast<std::size_t>(k)] > 0.0) last_nonzero = k;
  }

  const CounterRng rng(seed);
  SimResult result;
  result.slots = slots;
  result.seed = seed;
  result.slot_duration = cfg.slot_duration;
  result.occupancy.assign(static_cast<std::size_t>(M + 1), 0);
  if (options.record_transitions) {
    result.transitions.assign(static_cast<std::size_t>(M + 1) * static_cast<std::size_t>(M + 1), 0);
  }

  std::vector<NodeState> nodes(static_cast<std::size_t>(M));
  std::vector<std::uint64_t> cells(static_cast<std::size_t>(M));
  std::vector<int> active_nodes;
  std::vector<int> active_levels;
  std::vector<int> occupancy_scratch(static_cast<std::size_t>(K));
  std::vector<bool> ok;
  active_nodes.reserve(static_cast<std::size_t>(M));
  active_levels.reserve(static_cast<std::size_t>(M));
  int buffered_count = 0;

  for (std::int64_t s = 0; s < slots; ++s) {
    const bool counted = s >= options.warmup_slots;
    const int buffered_at_start = buffered_count;
    if (counted) {
      ++result.occupancy[static_cast<std::size_t>(buffered_at_start)];
      if (nodes[static_cast<std::size_t>(options.tracked_source)].buffered) ++result.buffered_slot_count;
    }

    active_nodes.clear();
    active_levels.clear();
    for (int n = 0; n < M; ++n) {
      const auto un = static_cast<std::size_t>(n);
      cells[un] = rng.cell(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(s));
      if (!nodes[un].buffered) continue;
      if (CounterRng::uniform(cells[un], kAttempt) >= cfg.p_tx) continue;
      // The level is chosen before the power check.
      const int k = pick_level(CounterRng::uniform(cells[un], kLevel), cumulative, last_nonzero);
      const double gain = -std::log1p(-CounterRng::uniform(cells[un], kChannel));
      if (ladder.levels[static_cast<std::size_t>(k)] > cfg.power_budget * gain) continue;
      active_nodes.push_back(n);
      active_levels.push_back(k);
    }

    const int delivered = decode_into(active_levels, occupancy_scratch, ok);
    if (counted) {
      result.total_deliveries += delivered;
      result.max_deliveries_per_slot = std::max(result.max_deliveries_per_slot, delivered);
    }
    for (std::size_t a = 0; a < active_nodes.size(); ++a) {
      if (!ok[a]) continue;
      auto& node = nodes[static_cast<std::size_t>(active_nodes[a])];
      if (active_nodes[a] == options.tracked_source && counted) {
        result.deliveries.push_back({node.generated, s + 1});
        ++result.success_count;
      }
      node.buffered = false;
    }

    // Slot end: flush (NRT), then arrivals replace whatever is held.
    buffered_count = 0;
    for (int n = 0; n < M; ++n) {
      auto& node = nodes[static_cast<std::size_t>(n)];
      if (scheme == Scheme::Nrt) node.buffered = false;
      if (CounterRng::uniform(cells[static_cast<std::size_t>(n)], kArrival) < cfg.lambda) {
        node.buffered = true;
        node.generated = s + 1;
      }
      buffered_count += node.buffered ? 1 : 0;
    }
    if (counted && options.record_transitions) {
      ++result.transitions[static_cast<std::size_t>(buffered_at_start) * static_cast<std::size_t>(M + 1) +
                           static_cast<std::size_t>(buffered_count)];
    }
  }

  result.avg_aoi = average_aoi_from_deliveries(result.deliveries, cfg.slot_duration);
  return result;
}

ReplicationSummary run_replications(const SystemConfig& cfg, Scheme scheme, std::int64_t slots,
                                    std::uint64_t base_seed, int reps, const SimOptions& options) {
  if (reps < 1) throw std::invalid_argument("run_replications: reps must be >= 1");
  require_valid(cfg);
  ReplicationSummary summary;
  summary.per_rep.resize(static_cast<std::size_t>(reps));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < reps; r = next++) {
      auto sim = run_simulation(cfg, scheme, slots, base_seed + static_cast<std::uint64_t>(r), options);
      summary.per_rep[static_cast<std::size_t>(r)] = sim.avg_aoi;
    }
  };
  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(reps));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  // Reduction in replication order keeps the summary bit-identical.
  int n = 0;
  double sum = 0.0;
  for (const auto& v : summary.per_rep) {
    if (!v) {
      ++summary.zero_delivery_reps;
      continue;
    }
    sum += *v;
    ++n;
  }
  if (n > 0) summary.mean = sum / n;
  if (n > 1) {
    double ss = 0.0;
    for (const auto& v : summary.per_rep) {
      if (v) ss += (*v - summary.mean) * (*v - summary.mean);
    }
    summary.stderr_mean = std::sqrt(ss / (n - 1) / n);
  }
  return summary;
}

std::vector<double> empirical_state_occupancy(const SystemConfig& cfg, std::int64_t slots,
                                              std::uint64_t seed) {
  const auto sim = run_simulation(cfg, Scheme::Rt, slots, seed);
  std::vector<double> freq(sim.occupancy.size());
  for (std::size_t i = 0; i < freq.size(); ++i) {
    freq[i] = static_cast<double>(sim.occupancy[i]) / static_cast<double>(slots);
  }
  return freq;
}

void write_delivery_csv(std::ostream& out, const SimResult& result) {
  const double T = result.slot_duration;
  const auto old_precision = out.precision(10);
  out << "j,t_j,t'_j,D_j,S_j,Q_j\n";
  for (std::size_t j = 0; j < result.deliveries.size(); ++j) {
    const auto& d = result.deliveries[j];
    const double t = static_cast<double>(d.generated) * T;
    const double tp = static_cast<double>(d.delivered) * T;
    const double s = tp - t;
    out << j + 1 << ',' << t << ',' << tp << ',';
    if (j == 0) {
      out << ',' << s << ",\n";  // no predecessor: D_1 and Q_1 undefined
      continue;
    }
    const auto& prev = result.deliveries[j - 1];
    const double dj = tp - static_cast<double>(prev.delivered) * T;
    const double s_prev = static_cast<double>(prev.delivered - prev.generated) * T;
    out << dj << ',' << s << ',' << dj * s_prev + 0.5 * dj * dj << '\n';
  }
  out.precision(old_precision);
}

}  // namespace noma_aoi
