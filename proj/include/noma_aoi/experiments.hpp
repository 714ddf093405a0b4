#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "noma_aoi/nrt_analysis.hpp"
#include "noma_aoi/system_config.hpp"

namespace noma_aoi {

/// Header plus rows of already-formatted cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// 10 significant digits, '.' decimal separator; empty for non-finite values.
std::string format_number(double value);

void write_csv(std::ostream& out, const CsvTable& table);

/// Grid of the reference tables.
inline constexpr std::array<double, 9> kTablePowerDb{-5, -2, 1, 4, 7, 10, 13, 17, 20};
inline constexpr int kTableMinLevels = 2;
inline constexpr int kTableMaxLevels = 10;

/// Slot duration at which the reference tables and figures are reproduced.
inline constexpr double kPublishedSlotDuration = 0.5;

/// Published parameterization: M=8, lambda=0.5, P_TX=0.5, R=0.2, uniform q,
/// T=kPublishedSlotDuration, with the given K and power budget.
SystemConfig table_scenario(int num_levels, double power_db);

/// Overrides of the embedded figure/table parameters. Any override marks
/// the output as a non-paper parameterization.
struct ReproduceOptions {
  std::optional<int> m;
  std::optional<double> lambda;
  std::optional<double> p_tx;
  std::optional<double> rate;
  std::optional<double> slot_duration;
  bool simulate = false;  // add Monte Carlo columns where a target supports them
  std::int64_t slots = 300'000;
  int reps = 1;
  std::uint64_t seed = 1;

  bool overridden() const { return m || lambda || p_tx || rate || slot_duration; }
};

const std::vector<std::string>& reproduce_targets();

/// Builds the CSV for table1, table2, fig4, fig5, fig6, fig8, fig9, fig10,
/// fig11 or fig12. Throws std::invalid_argument for unknown targets.
CsvTable reproduce(const std::string& target, const ReproduceOptions& options = {});

enum class SweepParam { M, K, Lambda, PTx, PowerDb, Q1 };
enum class SchemeSelector { Nrt, Rt, Both };
enum class OutputMode { Analysis, Simulation, Both };

std::optional<SweepParam> parse_sweep_param(const std::string& name);
const char* sweep_param_name(SweepParam p);

struct SweepSpec {
  SweepParam param = SweepParam::M;
  std::vector<double> values;
  SchemeSelector schemes = SchemeSelector::Both;
  OutputMode mode = OutputMode::Analysis;
  std::int64_t slots = 300'000;
  int reps = 1;
  std::uint64_t seed = 1;
};

/// from, from+step, ... up to `to` (inclusive within 1e-9 of step).
std::vector<double> range_values(double from, double to, double step);

/// Violations of the sweep invariants (empty list, values outside the
/// parameter's domain); empty when the sweep is runnable.
std::vector<std::string> validate_sweep(const SweepSpec& spec);

/// Applies one swept value to a base scenario (q1 sets q = (q1, 1-q1) and K=2).
SystemConfig apply_sweep_value(const SystemConfig& base, SweepParam param, double value);

/// Evaluates every sweep point (concurrently) and emits rows in sweep order.
CsvTable run_sweep(const SystemConfig& base, const SweepSpec& spec);

}  // namespace noma_aoi
