#include "noma_aoi/nrt_analysis.hpp"

#include <cmath>
#include <limits>

#include "noma_aoi/numeric.hpp"
#include "noma_aoi/rt_analysis.hpp"
#include "noma_aoi/success_distribution.hpp"

namespace noma_aoi {

namespace {

constexpr double kEtaTolerance = 1e-10;
constexpr int kEtaMaxIterations = 200;

void require_active_traffic(const SystemConfig& cfg) {
  if (cfg.lambda == 0.0) throw DegenerateConfig("no arrivals: lambda = 0 makes the AoI unbounded");
}

}  // namespace

const char* scheme_name(Scheme scheme) { return scheme == Scheme::Nrt ? "nrt" : "rt"; }

double success_prob_nrt(const SnrLadder& ladder, const SystemConfig& cfg) {
  const int M = cfg.num_sources;
  const int K = cfg.num_levels;
  const double active = cfg.lambda * ladder.bar_p_tx;
  const SuccessTable table(ladder.bar_q, M);
  double p = 0.0;
  for (int i = 1; i <= M; ++i) {
    // User 1 is active and i-1 of the other M-1 are.
    const double p_active = active * binomial_pmf(M - 1, i - 1, active);
    if (p_active == 0.0) continue;
    double given = 0.0;
    for (int x = 1; x <= gamma_max(i, K); ++x) given += table.u1(i, x);
    p += p_active * given;
  }
  return p;
}

NrtResult nrt_result_from_success(double success_prob, double slot_duration) {
  if (!(success_prob > 0.0)) throw DegenerateConfig("success probability is zero: AoI unbounded");
  const double T = slot_duration;
  NrtResult r;
  r.success_prob = success_prob;
  r.mean_interval = T / success_prob;
  r.second_moment_interval = T * T * (2.0 - success_prob) / (success_prob * success_prob);
  r.mean_system_time = T;
  r.avg_aoi = T / 2.0 + T / success_prob;
  return r;
}

NrtResult average_aoi_nrt(const SystemConfig& cfg) {
  require_active_traffic(cfg);
  const SnrLadder ladder = configure_snr_ladder(cfg);
  if (!(cfg.lambda * ladder.bar_p_tx > 0.0)) {
    throw DegenerateConfig("no power-feasible transmissions: effective activation probability is 0");
  }
  return nrt_result_from_success(success_prob_nrt(ladder, cfg), cfg.slot_duration);
}

double corollary1_objective(double eta, double q1) {
  const double q2 = 1.0 - q1;
  const double quadratic = -eta * eta * q2 / q1 + (2.0 * q1 - 1.0) * q2 * eta / q1 + q2;
  return quadratic * std::exp(-eta / q1) + (1.0 - eta) * q1 * std::exp(-eta);
}

EtaBracket corollary1_bracket(double q1) {
  const double root = ((2.0 * q1 - 1.0) + std::sqrt(1.0 + 4.0 * q1 * q1)) / 2.0;
  return {std::min(root, 1.0), std::max(root, 1.0)};
}

OptimalPtx optimal_ptx_nrt_k2(const SystemConfig& cfg) {
  if (cfg.num_levels != 2) throw std::invalid_argument("optimal_ptx_nrt_k2 requires K = 2");
  require_active_traffic(cfg);
  const SnrLadder ladder = configure_snr_ladder(cfg);
  const double q1 = ladder.bar_q[0];
  if (!(q1 > 0.0 && q1 < 1.0)) throw BracketFailure("q1 must lie strictly between 0 and 1");

  auto [lo, hi] = corollary1_bracket(q1);
  double f_lo = corollary1_objective(lo, q1);
  const double f_hi = corollary1_objective(hi, q1);
  if (f_lo == 0.0) {
    hi = lo;
  } else if (f_hi == 0.0) {
    lo = hi;
  } else if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw BracketFailure("optimum equation does not change sign on [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
  }
  for (int it = 0; it < kEtaMaxIterations && hi - lo > kEtaTolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = corollary1_objective(mid, q1);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }

  OptimalPtx out;
  out.eta = 0.5 * (lo + hi);
  out.bar_p_tx = out.eta / (cfg.lambda * cfg.num_sources * q1);
  out.p_tx = attempt_prob_for_effective(ladder, out.bar_p_tx);
  if (out.p_tx > 1.0) {
    out.p_tx = 1.0;
    out.clamped = true;
  }
  return out;
}

double ptx_grid_argmin(const std::function<double(double)>& aoi_of_ptx, double step) {
  if (!(step > 0.0 && step <= 0.5)) throw std::invalid_argument("grid step must be in (0, 0.5]");
  const auto n = static_cast<int>(std::floor(1.0 / step + 1e-9));
  double best_ptx = step;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= n; ++j) {
    const double ptx = j * step;
    const double v = aoi_of_ptx(ptx);
    if (std::isfinite(v) && v < best) {
      best = v;
      best_ptx = ptx;
    }
  }
  return best_ptx;
}

double average_aoi(const SystemConfig& cfg, Scheme scheme) {
  return scheme == Scheme::Nrt ? average_aoi_nrt(cfg).avg_aoi : average_aoi_rt(cfg).avg_aoi;
}

double ptx_grid_argmin(const SystemConfig& cfg, Scheme scheme, double step) {
  return ptx_grid_argmin(
      [&](double ptx) {
        SystemConfig c = cfg;
        c.p_tx = ptx;
        try {
          return average_aoi(c, scheme);
        } catch (const DegenerateConfig&) {
          return std::numeric_limits<double>::infinity();
        }
      },
      step);
}

}  // namespace noma_aoi
