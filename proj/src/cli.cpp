#include "noma_aoi/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "noma_aoi/config_file.hpp"
#include "noma_aoi/experiments.hpp"
#include "noma_aoi/nrt_analysis.hpp"
#include "noma_aoi/rt_analysis.hpp"
#include "noma_aoi/simulator.hpp"

namespace noma_aoi {

namespace {

struct Flags {
  std::string config_path;
  int m = 8;
  int k = 2;
  double lambda = 0.5;
  double ptx = 0.5;
  double power_db = 20.0;
  double rate = 0.2;
  std::string q = "uniform";
  double slot = 1.0;

  std::string scheme = "nrt";
  std::uint64_t seed = 1;
  std::int64_t slots = 300'000;
  std::int64_t warmup = 0;
  int reps = 1;
  std::string csv_path;
  double tolerance = 0.02;

  std::string method = "grid";
  double grid_step = 0.01;

  std::string param;
  double from = 0.0;
  double to = 0.0;
  double step = 0.0;
  std::string values;
  std::string mode = "analysis";

  std::string target;
  bool simulate = false;

  // Scenario options of the selected subcommand, to tell explicit flags
  // from defaults.
  CLI::Option* m_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* ptx_opt = nullptr;
  CLI::Option* power_opt = nullptr;
  CLI::Option* rate_opt = nullptr;
  CLI::Option* q_opt = nullptr;
  CLI::Option* slot_opt = nullptr;
};

class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioOptions {
  CLI::Option* m = nullptr;
  CLI::Option* k = nullptr;
  CLI::Option* lambda = nullptr;
  CLI::Option* ptx = nullptr;
  CLI::Option* power = nullptr;
  CLI::Option* rate = nullptr;
  CLI::Option* q = nullptr;
  CLI::Option* slot = nullptr;
};

ScenarioOptions add_scenario_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "Scenario file (key = value lines)");
  ScenarioOptions o;
  o.m = cmd->add_option("--m", f.m, "Number of sources M")->capture_default_str();
  o.k = cmd->add_option("--k", f.k, "Number of SNR levels K")->capture_default_str();
  o.lambda = cmd->add_option("--lambda", f.lambda, "Per-slot arrival probability")->capture_default_str();
  o.ptx = cmd->add_option("--ptx", f.ptx, "Attempted transmission probability")->capture_default_str();
  o.power = cmd->add_option("--power-db", f.power_db, "Power budget P in dB")->capture_default_str();
  o.rate = cmd->add_option("--rate", f.rate, "Target rate R (bits/s/Hz)")->capture_default_str();
  o.q = cmd->add_option("--q", f.q, "Level distribution: uniform | v1,v2,...")->capture_default_str();
  o.slot = cmd->add_option("--slot", f.slot, "Slot duration T")->capture_default_str();
  return o;
}

void select_scenario_options(Flags& f, const ScenarioOptions& o) {
  f.m_opt = o.m;
  f.k_opt = o.k;
  f.lambda_opt = o.lambda;
  f.ptx_opt = o.ptx;
  f.power_opt = o.power;
  f.rate_opt = o.rate;
  f.q_opt = o.q;
  f.slot_opt = o.slot;
}

void add_scheme_flag(CLI::App* cmd, Flags& f, bool allow_both) {
  std::vector<std::string> choices{"nrt", "rt"};
  if (allow_both) choices.emplace_back("both");
  cmd->add_option("--scheme", f.scheme, "Transmission strategy")
      ->check(CLI::IsMember(choices))
      ->capture_default_str();
}

void add_sim_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--seed", f.seed, "Base RNG seed")->capture_default_str();
  cmd->add_option("--slots", f.slots, "Slots per replication")->capture_default_str();
  cmd->add_option("--reps", f.reps, "Replications")->capture_default_str();
  cmd->add_option("--warmup", f.warmup, "Slots discarded before statistics")->capture_default_str();
}

ScenarioSpec explicit_flags(const Flags& f) {
  ScenarioSpec s;
  if (f.m_opt->count()) s.m = f.m;
  if (f.k_opt->count()) s.k = f.k;
  if (f.lambda_opt->count()) s.lambda = f.lambda;
  if (f.ptx_opt->count()) s.p_tx = f.ptx;
  if (f.power_opt->count()) s.power_db = f.power_db;
  if (f.rate_opt->count()) s.rate = f.rate;
  if (f.q_opt->count()) s.q = f.q;
  if (f.slot_opt->count()) s.slot_duration = f.slot;
  return s;
}

// Defaults < scenario file < explicit flags.
SystemConfig resolve_config(const Flags& f) {
  ScenarioSpec spec;
  spec.m = f.m;
  spec.k = f.k;
  spec.lambda = f.lambda;
  spec.p_tx = f.ptx;
  spec.power_db = f.power_db;
  spec.rate = f.rate;
  spec.q = f.q;
  spec.slot_duration = f.slot;
  if (!f.config_path.empty()) spec.overlay(load_scenario_file(f.config_path));
  spec.overlay(explicit_flags(f));
  return to_system_config(spec, SystemConfig{});
}

SystemConfig resolve_valid_config(const Flags& f) {
  SystemConfig cfg = resolve_config(f);
  require_valid(cfg);
  return cfg;
}

Scheme parse_scheme(const std::string& s) { return s == "rt" ? Scheme::Rt : Scheme::Nrt; }

std::string fmt(double v) {
  const std::string s = format_number(v);
  return s.empty() ? (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")) : s;
}

std::string fmt_level(double v) {
  std::string s = format_number(v);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string fmt_db(double linear) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", linear_to_db(linear));
  std::string s = buf;
  return s == "-0" ? "0" : s;
}

// Writes to --csv if given, else to `out`.
void emit_csv(const Flags& f, const CsvTable& table, std::ostream& out) {
  if (f.csv_path.empty()) {
    write_csv(out, table);
    return;
  }
  std::ofstream file(f.csv_path);
  if (!file) throw CliError("cannot write '" + f.csv_path + "'");
  write_csv(file, table);
}

int cmd_levels(const Flags& f, std::ostream& out) {
  const SystemConfig cfg = resolve_valid_config(f);
  const SnrLadder ladder = configure_snr_ladder(cfg);
  for (std::size_t k = 0; k < ladder.levels.size(); ++k) {
    out << "P_" << k + 1 << " = " << fmt_level(ladder.levels[k]) << " (" << fmt_db(ladder.levels[k]) << " dB)\n";
  }
  out << "bar_p_tx = " << fmt(ladder.bar_p_tx) << '\n';
  out << "bar_q =";
  for (double v : ladder.bar_q) out << ' ' << fmt(v);
  out << '\n';
  return kExitOk;
}

int cmd_analyze(const Flags& f, std::ostream& out) {
  const SystemConfig cfg = resolve_config(f);
  const Scheme scheme = parse_scheme(f.scheme);
  double success = 0.0;
  double ed = 0.0;
  double ed2 = 0.0;
  double es = 0.0;
  double aoi = 0.0;
  if (scheme == Scheme::Nrt) {
    const auto r = average_aoi_nrt(cfg);
    success = r.success_prob;
    ed = r.mean_interval;
    ed2 = r.second_moment_interval;
    es = r.mean_system_time;
    aoi = r.avg_aoi;
  } else {
    const auto r = average_aoi_rt(cfg);
    success = r.success_prob;
    ed = r.moments.mean_interval;
    ed2 = r.moments.second_moment_interval;
    es = r.moments.mean_system_time;
    aoi = r.avg_aoi;
  }
  out << "scheme: " << scheme_name(scheme) << '\n'
      << "success_prob: " << fmt(success) << '\n'
      << "E{D}: " << fmt(ed) << '\n'
      << "E{D^2}: " << fmt(ed2) << '\n'
      << "E{S}: " << fmt(es) << '\n'
      << "avg_aoi: " << fmt(aoi) << '\n';
  if (!f.csv_path.empty()) {
    CsvTable t;
    t.header = {"scheme", "success_prob", "mean_interval", "second_moment_interval", "mean_system_time", "avg_aoi"};
    t.rows.push_back({scheme_name(scheme), format_number(success), format_number(ed), format_number(ed2),
                      format_number(es), format_number(aoi)});
    emit_csv(f, t, out);
  }
  return kExitOk;
}

int cmd_simulate(const Flags& f, std::ostream& out, std::ostream& err) {
  const SystemConfig cfg = resolve_valid_config(f);
  const Scheme scheme = parse_scheme(f.scheme);
  SimOptions options;
  options.warmup_slots = f.warmup;
  if (f.reps > 1) {
    const auto s = run_replications(cfg, scheme, f.slots, f.seed, f.reps, options);
    out << "scheme: " << scheme_name(scheme) << '\n'
        << "reps: " << f.reps << '\n'
        << "avg_aoi_mean: " << fmt(s.mean) << '\n'
        << "avg_aoi_stderr: " << fmt(s.stderr_mean) << '\n';
    if (!s.complete()) {
      err << "error: " << s.zero_delivery_reps << " replication(s) delivered fewer than two updates; AoI undefined\n";
      return kExitError;
    }
    return kExitOk;
  }
  const auto r = run_simulation(cfg, scheme, f.slots, f.seed, options);
  out << "scheme: " << scheme_name(scheme) << '\n'
      << "slots: " << r.slots << '\n'
      << "deliveries: " << r.success_count << '\n'
      << "buffered_slots: " << r.buffered_slot_count << '\n'
      << "avg_aoi: " << (r.avg_aoi ? fmt(*r.avg_aoi) : std::string("undefined")) << '\n';
  if (!f.csv_path.empty()) {
    std::ofstream file(f.csv_path);
    if (!file) throw CliError("cannot write '" + f.csv_path + "'");
    write_delivery_csv(file, r);
  }
  if (!r.avg_aoi) {
    err << "error: fewer than two deliveries; AoI undefined\n";
    return kExitError;
  }
  return kExitOk;
}

int cmd_compare(const Flags& f, std::ostream& out, std::ostream& err) {
  const SystemConfig cfg = resolve_valid_config(f);
  const Scheme scheme = parse_scheme(f.scheme);
  const double analysis = average_aoi(cfg, scheme);
  SimOptions options;
  options.warmup_slots = f.warmup;
  const auto s = run_replications(cfg, scheme, f.slots, f.seed, f.reps, options);
  out << "scheme: " << scheme_name(scheme) << '\n' << "analysis: " << fmt(analysis) << '\n';
  if (!s.complete()) {
    out << "simulation: undefined\nresult: FAIL\n";
    err << "error: " << s.zero_delivery_reps << " replication(s) delivered fewer than two updates\n";
    return kExitToleranceFailure;
  }
  const double rel = std::abs(s.mean - analysis) / analysis;
  const bool pass = rel <= f.tolerance;
  out << "simulation: " << fmt(s.mean) << " (stderr " << fmt(s.stderr_mean) << ", " << f.reps << " reps x "
      << f.slots << " slots)\n"
      << "relative_error: " << fmt(rel) << '\n'
      << "tolerance: " << fmt(f.tolerance) << '\n'
      << "result: " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitToleranceFailure;
}

int cmd_optimize(const Flags& f, std::ostream& out) {
  SystemConfig cfg = resolve_valid_config(f);
  const Scheme scheme = parse_scheme(f.scheme);
  if (f.method == "corollary1") {
    if (scheme != Scheme::Nrt) throw CliError("unsupported method: corollary1 applies to the nrt scheme only");
    if (cfg.num_levels != 2) throw CliError("unsupported method: corollary1 requires K = 2");
    const auto opt = optimal_ptx_nrt_k2(cfg);
    cfg.p_tx = opt.p_tx;
    out << "method: corollary1\n"
        << "eta: " << fmt(opt.eta) << '\n'
        << "bar_p_tx: " << fmt(opt.bar_p_tx) << '\n'
        << "p_tx: " << fmt(opt.p_tx) << (opt.clamped ? " (clamped to 1)" : "") << '\n'
        << "avg_aoi: " << fmt(average_aoi(cfg, scheme)) << '\n';
    return kExitOk;
  }
  const double best = ptx_grid_argmin(cfg, scheme, f.grid_step);
  cfg.p_tx = best;
  out << "method: grid\n"
      << "scheme: " << scheme_name(scheme) << '\n'
      << "grid_step: " << fmt(f.grid_step) << '\n'
      << "p_tx: " << fmt(best) << '\n'
      << "avg_aoi: " << fmt(average_aoi(cfg, scheme)) << '\n';
  return kExitOk;
}

int cmd_sweep(const Flags& f, std::ostream& out) {
  const SystemConfig base = resolve_config(f);
  SweepSpec spec;
  const auto param = parse_sweep_param(f.param);
  if (!param) throw CliError("unknown sweep parameter '" + f.param + "' (M, K, lambda, p_tx, power_db, q1)");
  spec.param = *param;
  if (!f.values.empty()) {
    std::stringstream ss(f.values);
    std::string item;
    while (std::getline(ss, item, ',')) spec.values.push_back(std::stod(item));
  } else {
    spec.values = range_values(f.from, f.to, f.step);
  }
  spec.schemes = f.scheme == "both" ? SchemeSelector::Both
                 : f.scheme == "rt" ? SchemeSelector::Rt
                                    : SchemeSelector::Nrt;
  spec.mode = f.mode == "simulation" ? OutputMode::Simulation
              : f.mode == "both"     ? OutputMode::Both
                                     : OutputMode::Analysis;
  spec.slots = f.slots;
  spec.reps = f.reps;
  spec.seed = f.seed;
  if (auto errors = validate_sweep(spec); !errors.empty()) throw CliError(errors.front());
  // Every swept point must be a valid scenario once the swept value is applied.
  for (double v : spec.values) require_valid(apply_sweep_value(base, spec.param, v));
  emit_csv(f, run_sweep(base, spec), out);
  return kExitOk;
}

int cmd_reproduce(const Flags& f, std::ostream& out, std::ostream& err) {
  ReproduceOptions o;
  if (f.m_opt->count()) o.m = f.m;
  if (f.lambda_opt->count()) o.lambda = f.lambda;
  if (f.ptx_opt->count()) o.p_tx = f.ptx;
  if (f.rate_opt->count()) o.rate = f.rate;
  if (f.slot_opt->count()) o.slot_duration = f.slot;
  if (f.k_opt->count() || f.power_opt->count() || f.q_opt->count()) {
    throw CliError("--k, --power-db and --q are swept by the reproduce targets and cannot be overridden");
  }
  o.simulate = f.simulate;
  o.slots = f.slots;
  o.reps = f.reps;
  o.seed = f.seed;
  if (o.overridden()) err << "# non-paper parameterization: embedded figure/table parameters overridden\n";
  emit_csv(f, reproduce(f.target, o), out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Average age of information for NOMA-assisted grant-free uplink access", "noma-aoi"};
  app.require_subcommand(1);
  Flags f;
  std::vector<std::pair<CLI::App*, ScenarioOptions>> scenario_options;
  auto scenario_flags = [&](CLI::App* cmd) { scenario_options.emplace_back(cmd, add_scenario_flags(cmd, f)); };

  auto* levels = app.add_subcommand("levels", "Print the received-SNR ladder and effective access probabilities");
  scenario_flags(levels);

  auto* analyze = app.add_subcommand("analyze", "Closed-form success probability, interval moments and AoI");
  scenario_flags(analyze);
  add_scheme_flag(analyze, f, false);
  analyze->add_option("--csv", f.csv_path, "Also write a CSV row to this path");

  auto* simulate = app.add_subcommand("simulate", "Slot-level Monte Carlo simulation");
  scenario_flags(simulate);
  add_scheme_flag(simulate, f, false);
  add_sim_flags(simulate, f);
  simulate->add_option("--csv", f.csv_path, "Write the delivery log of a single run as CSV");

  auto* compare = app.add_subcommand("compare", "Analysis versus simulation with a relative tolerance");
  scenario_flags(compare);
  add_scheme_flag(compare, f, false);
  add_sim_flags(compare, f);
  compare->add_option("--tolerance", f.tolerance, "Relative tolerance")->capture_default_str();

  auto* optimize = app.add_subcommand("optimize", "Recommend the attempted transmission probability");
  scenario_flags(optimize);
  add_scheme_flag(optimize, f, false);
  optimize->add_option("--method", f.method, "corollary1 | grid")
      ->check(CLI::IsMember({"corollary1", "grid"}))
      ->capture_default_str();
  optimize->add_option("--grid-step", f.grid_step, "Grid step for --method grid")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and emit CSV");
  scenario_flags(sweep);
  add_scheme_flag(sweep, f, true);
  add_sim_flags(sweep, f);
  sweep->add_option("--param", f.param, "M | K | lambda | p_tx | power_db | q1")->required();
  sweep->add_option("--from", f.from, "Range start");
  sweep->add_option("--to", f.to, "Range end (inclusive)");
  sweep->add_option("--step", f.step, "Range step");
  sweep->add_option("--values", f.values, "Explicit comma-separated values (instead of a range)");
  sweep->add_option("--mode", f.mode, "analysis | simulation | both")
      ->check(CLI::IsMember({"analysis", "simulation", "both"}))
      ->capture_default_str();
  sweep->add_option("--csv", f.csv_path, "Output path (default stdout)");

  auto* reproduce_cmd = app.add_subcommand("reproduce", "Regenerate a reference table or figure as CSV");
  scenario_flags(reproduce_cmd);
  add_sim_flags(reproduce_cmd, f);
  reproduce_cmd->add_option("target", f.target, "table1 | table2 | fig4 | fig5 | fig6 | fig8 | fig9 | fig10 | fig11 | fig12")
      ->required();
  reproduce_cmd->add_flag("--simulate", f.simulate, "Add Monte Carlo columns to figure targets");
  reproduce_cmd->add_option("--csv", f.csv_path, "Output path (default stdout)");

  std::vector<std::string> argv_store{"noma-aoi"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  for (const auto& [cmd, opts] : scenario_options) {
    if (cmd->parsed()) select_scenario_options(f, opts);
  }

  try {
    if (*levels) return cmd_levels(f, out);
    if (*analyze) return cmd_analyze(f, out);
    if (*simulate) return cmd_simulate(f, out, err);
    if (*compare) return cmd_compare(f, out, err);
    if (*optimize) return cmd_optimize(f, out);
    if (*sweep) return cmd_sweep(f, out);
    if (*reproduce_cmd) return cmd_reproduce(f, out, err);
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace noma_aoi
