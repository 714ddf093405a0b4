#include "noma_aoi/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "noma_aoi/rt_analysis.hpp"
#include "noma_aoi/simulator.hpp"

namespace noma_aoi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Row = std::vector<std::pair<std::string, double>>;
using RowThunk = std::function<Row()>;

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) body(i);
  };
  const unsigned workers =
      std::min<unsigned>(std::max(1U, std::thread::hardware_concurrency()), static_cast<unsigned>(n));
  if (workers <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
}

// Rows are computed concurrently and emitted in construction order.
CsvTable assemble(const std::vector<RowThunk>& thunks) {
  std::vector<Row> rows(thunks.size());
  parallel_for(thunks.size(), [&](std::size_t i) { rows[i] = thunks[i](); });
  CsvTable table;
  if (rows.empty()) return table;
  for (const auto& [name, v] : rows.front()) table.header.push_back(name);
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (const auto& [name, v] : row) cells.push_back(format_number(v));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

double analysis_or_nan(const SystemConfig& cfg, Scheme scheme) {
  try {
    return average_aoi(cfg, scheme);
  } catch (const DegenerateConfig&) {
    return kNaN;
  } catch (const InvalidConfig&) {
    return kNaN;
  }
}

std::pair<double, double> simulate_mean(const SystemConfig& cfg, Scheme scheme, std::int64_t slots,
                                        int reps, std::uint64_t seed) {
  try {
    const auto s = run_replications(cfg, scheme, slots, seed, reps);
    if (!s.complete()) return {kNaN, kNaN};
    return {s.mean, reps > 1 ? s.stderr_mean : kNaN};
  } catch (const InvalidConfig&) {
    return {kNaN, kNaN};
  }
}

std::string label(const std::string& prefix, double v) {
  return prefix + format_number(v);
}

SystemConfig figure_base(int m, int k, double lambda, double p_tx, double power_db,
                         const ReproduceOptions& o) {
  SystemConfig c;
  c.num_sources = m;
  c.num_levels = k;
  c.q = uniform_q(k);
  c.lambda = lambda;
  c.p_tx = p_tx;
  c.power_budget = db_to_linear(power_db);
  c.rate = 0.2;
  c.slot_duration = kPublishedSlotDuration;
  if (o.m) c.num_sources = *o.m;
  if (o.lambda) c.lambda = *o.lambda;
  if (o.p_tx) c.p_tx = *o.p_tx;
  if (o.rate) c.rate = *o.rate;
  if (o.slot_duration) c.slot_duration = *o.slot_duration;
  return c;
}

void with_levels(SystemConfig& c, int k) {
  c.num_levels = k;
  c.q = uniform_q(k);
}

struct Series {
  std::string column;
  SystemConfig cfg;
  Scheme scheme;
};

Row evaluate_series(Row row, const std::vector<Series>& series, const ReproduceOptions& o) {
  for (const auto& s : series) row.emplace_back(s.column, analysis_or_nan(s.cfg, s.scheme));
  if (o.simulate) {
    for (const auto& s : series) {
      const auto [mean, se] = simulate_mean(s.cfg, s.scheme, o.slots, o.reps, o.seed);
      row.emplace_back("sim_" + s.column, mean);
      if (o.reps > 1) row.emplace_back("sim_" + s.column + "_stderr", se);
    }
  }
  return row;
}

CsvTable table(Scheme scheme, const ReproduceOptions& o) {
  if (o.simulate) throw std::invalid_argument("table targets are analytical only; use compare or sweep to simulate");
  std::vector<RowThunk> rows;
  for (int k = kTableMinLevels; k <= kTableMaxLevels; ++k) {
    rows.emplace_back([k, scheme, o] {
      Row row{{"K", k}};
      for (double p : kTablePowerDb) {
        SystemConfig c = figure_base(8, k, 0.5, 0.5, p, o);
        row.emplace_back(format_number(p), analysis_or_nan(c, scheme));
      }
      return row;
    });
  }
  return assemble(rows);
}

// Average AoI versus M for K in {2, 4}.
CsvTable fig4(const ReproduceOptions& o) {
  std::vector<RowThunk> rows;
  for (int m = 2; m <= 20; m += 2) {
    rows.emplace_back([m, o] {
      std::vector<Series> series;
      for (int k : {2, 4}) {
        SystemConfig c = figure_base(m, k, 0.5, 0.5, 20.0, o);
        c.num_sources = m;
        series.push_back({label("nrt_K", k), c, Scheme::Nrt});
        series.push_back({label("rt_K", k), c, Scheme::Rt});
      }
      return evaluate_series({{"M", m}}, series, o);
    });
  }
  return assemble(rows);
}

// Average AoI versus K (K = 1 is the orthogonal baseline) for several M.
CsvTable fig5(const ReproduceOptions& o) {
  std::vector<RowThunk> rows;
  for (int k = 1; k <= 10; ++k) {
    rows.emplace_back([k, o] {
      std::vector<Series> series;
      for (int m : {4, 8, 16}) {
        SystemConfig c = figure_base(m, k, 0.5, 0.5, 20.0, o);
        c.num_sources = m;
        series.push_back({label("nrt_M", m), c, Scheme::Nrt});
        series.push_back({label("rt_M", m), c, Scheme::Rt});
      }
      return evaluate_series({{"K", k}}, series, o);
    });
  }
  return assemble(rows);
}

// Average AoI versus power budget for K = 2..10.
CsvTable fig6(const ReproduceOptions& o) {
  std::vector<RowThunk> rows;
  for (int p = -5; p <= 20; ++p) {
    rows.emplace_back([p, o] {
      std::vector<Series> series;
      for (Scheme scheme : {Scheme::Nrt, Scheme::Rt}) {
        for (int k = kTableMinLevels; k <= kTableMaxLevels; ++k) {
          SystemConfig c = figure_base(8, k, 0.5, 0.5, p, o);
          series.push_back({std::string(scheme_name(scheme)) + label("_K", k), c, scheme});
        }
      }
      return evaluate_series({{"power_db", p}}, series, o);
    });
  }
  return assemble(rows);
}

// Average AoI versus attempt probability, M=32, K=2, several q1.
CsvTable fig8(const ReproduceOptions& o) {
  std::vector<RowThunk> rows;
  for (int j = 1; j <= 100; ++j) {
    rows.emplace_back([j, o] {
      const double ptx = j / 100.0;
      std::vector<Series> series;
      for (Scheme scheme : {Scheme::Nrt, Scheme::Rt}) {
        for (double q1 : {0.3, 0.5, 0.7}) {
          SystemConfig c = figure_base(32, 2, 0.5, ptx, 20.0, o);
          c.p_tx = ptx;
          c.q = {q1, 1.0 - q1};
          series.push_back({std::string(scheme_name(scheme)) + label("_q1=", q1), c, scheme});
        }
      }
      return evaluate_series({{"p_tx", ptx}}, series, o);
    });
  }
  return assemble(rows);
}

// lambda x P_TX surface, M=8, given K.
CsvTable surface(int k, const ReproduceOptions& o) {
  std::vector<RowThunk> rows;
  for (int li = 1; li <= 20; ++li) {
    for (int pj = 1; pj <= 20; ++pj) {
      rows.emplace_back([li, pj, k, o] {
        const double lambda = li * 0.05;
        const double ptx = pj * 0.05;
        SystemConfig c = figure_base(8, k, lambda, ptx, 20.0, o);
        c.lambda = lambda;
        c.p_tx = ptx;
        return evaluate_series({{"lambda", lambda}, {"p_tx", ptx}},
                               {{"nrt", c, Scheme::Nrt}, {"rt", c, Scheme::Rt}}, o);
      });
    }
  }
  return assemble(rows);
}

// Average AoI versus q1 at the optimized attempt probability, K=2, lambda=0.4.
CsvTable q1_curve(Scheme scheme, const ReproduceOptions& o) {
  std::vector<RowThunk> rows;
  for (int j = 1; j <= 19; ++j) {
    rows.emplace_back([j, scheme, o] {
      const double q1 = j * 0.05;
      Row row{{"q1", q1}};
      std::vector<Series> series;
      for (int m : {8, 16, 32}) {
        SystemConfig c = figure_base(m, 2, 0.4, 0.5, 20.0, o);
        c.num_sources = m;
        c.q = {q1, 1.0 - q1};
        double ptx = kNaN;
        if (scheme == Scheme::Nrt) {
          try {
            ptx = optimal_ptx_nrt_k2(c).p_tx;
          } catch (const BracketFailure&) {
            ptx = ptx_grid_argmin(c, scheme, 0.01);
          }
        } else {
          ptx = ptx_grid_argmin(c, scheme, 0.01);
        }
        c.p_tx = ptx;
        row.emplace_back(label("ptx_M", m), ptx);
        series.push_back({std::string(scheme_name(scheme)) + label("_M", m), c, scheme});
      }
      return evaluate_series(row, series, o);
    });
  }
  return assemble(rows);
}

}  // namespace

std::string format_number(double value) {
  if (!std::isfinite(value)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

SystemConfig table_scenario(int num_levels, double power_db) {
  return figure_base(8, num_levels, 0.5, 0.5, power_db, {});
}

const std::vector<std::string>& reproduce_targets() {
  static const std::vector<std::string> targets{"table1", "table2", "fig4",  "fig5",  "fig6",
                                                "fig8",   "fig9",   "fig10", "fig11", "fig12"};
  return targets;
}

CsvTable reproduce(const std::string& target, const ReproduceOptions& options) {
  if (target == "table1") return table(Scheme::Nrt, options);
  if (target == "table2") return table(Scheme::Rt, options);
  if (target == "fig4") return fig4(options);
  if (target == "fig5") return fig5(options);
  if (target == "fig6") return fig6(options);
  if (target == "fig8") return fig8(options);
  if (target == "fig9") return surface(2, options);
  if (target == "fig10") return surface(16, options);
  if (target == "fig11") return q1_curve(Scheme::Nrt, options);
  if (target == "fig12") return q1_curve(Scheme::Rt, options);
  throw std::invalid_argument("unknown reproduce target '" + target + "'");
}

std::optional<SweepParam> parse_sweep_param(const std::string& name) {
  if (name == "M" || name == "m") return SweepParam::M;
  if (name == "K" || name == "k") return SweepParam::K;
  if (name == "lambda") return SweepParam::Lambda;
  if (name == "p_tx" || name == "ptx") return SweepParam::PTx;
  if (name == "power_db") return SweepParam::PowerDb;
  if (name == "q1") return SweepParam::Q1;
  return std::nullopt;
}

const char* sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::M: return "M";
    case SweepParam::K: return "K";
    case SweepParam::Lambda: return "lambda";
    case SweepParam::PTx: return "p_tx";
    case SweepParam::PowerDb: return "power_db";
    case SweepParam::Q1: return "q1";
  }
  return "?";
}

std::vector<double> range_values(double from, double to, double step) {
  std::vector<double> v;
  if (!(step > 0.0) || !(from <= to)) return v;
  const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(from + static_cast<double>(i) * step);
  return v;
}

std::vector<std::string> validate_sweep(const SweepSpec& spec) {
  std::vector<std::string> errors;
  if (spec.values.empty()) errors.emplace_back("sweep range is empty");
  const std::string name = sweep_param_name(spec.param);
  for (double v : spec.values) {
    bool ok = std::isfinite(v);
    switch (spec.param) {
      case SweepParam::M:
      case SweepParam::K: ok = ok && v >= 1.0 && v == std::floor(v); break;
      case SweepParam::Lambda:
      case SweepParam::PTx: ok = ok && v > 0.0 && v <= 1.0; break;
      case SweepParam::PowerDb: break;
      case SweepParam::Q1: ok = ok && v >= 0.0 && v <= 1.0; break;
    }
    if (!ok) errors.push_back(name + " value " + format_number(v) + " is outside its domain");
  }
  if (spec.reps < 1) errors.emplace_back("reps must be >= 1");
  if (spec.slots < 1) errors.emplace_back("slots must be >= 1");
  return errors;
}

SystemConfig apply_sweep_value(const SystemConfig& base, SweepParam param, double value) {
  SystemConfig c = base;
  switch (param) {
    case SweepParam::M: c.num_sources = static_cast<int>(value); break;
    case SweepParam::K: with_levels(c, static_cast<int>(value)); break;
    case SweepParam::Lambda: c.lambda = value; break;
    case SweepParam::PTx: c.p_tx = value; break;
    case SweepParam::PowerDb: c.power_budget = db_to_linear(value); break;
    case SweepParam::Q1:
      c.num_levels = 2;
      c.q = {value, 1.0 - value};
      break;
  }
  return c;
}

CsvTable run_sweep(const SystemConfig& base, const SweepSpec& spec) {
  if (auto errors = validate_sweep(spec); !errors.empty()) throw std::invalid_argument(errors.front());
  std::vector<Scheme> schemes;
  if (spec.schemes != SchemeSelector::Rt) schemes.push_back(Scheme::Nrt);
  if (spec.schemes != SchemeSelector::Nrt) schemes.push_back(Scheme::Rt);

  std::vector<RowThunk> rows;
  for (double value : spec.values) {
    rows.emplace_back([&base, &spec, schemes, value] {
      const SystemConfig c = apply_sweep_value(base, spec.param, value);
      Row row{{sweep_param_name(spec.param), value}};
      if (spec.mode != OutputMode::Simulation) {
        for (Scheme s : schemes) row.emplace_back(scheme_name(s), analysis_or_nan(c, s));
      }
      if (spec.mode != OutputMode::Analysis) {
        for (Scheme s : schemes) {
          const auto [mean, se] = simulate_mean(c, s, spec.slots, spec.reps, spec.seed);
          row.emplace_back(std::string("sim_") + scheme_name(s), mean);
          if (spec.reps > 1) row.emplace_back(std::string("sim_") + scheme_name(s) + "_stderr", se);
        }
      }
      return row;
    });
  }
  return assemble(rows);
}

}  // namespace noma_aoi
