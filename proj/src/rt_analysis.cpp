#include "noma_aoi/rt_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "noma_aoi/numeric.hpp"
#include "noma_aoi/success_distribution.hpp"

namespace noma_aoi {

namespace {

constexpr double kResidualTol = 1e-10;
constexpr double kPowerTol = 1e-12;
constexpr long kPowerMaxIterations = 1'000'000;

double fixed_point_residual(const Eigen::VectorXd& pi, const Eigen::MatrixXd& P) {
  const Eigen::RowVectorXd row = pi.transpose();
  return (row * P - row).cwiseAbs().maxCoeff();
}

Eigen::VectorXd clean_distribution(Eigen::VectorXd pi) {
  for (Eigen::Index i = 0; i < pi.size(); ++i) pi[i] = std::max(pi[i], 0.0);
  const double s = pi.sum();
  if (s > 0.0) pi /= s;
  return pi;
}

Eigen::VectorXd power_iteration(const Eigen::MatrixXd& P) {
  const Eigen::Index n = P.rows();
  // Lazy chain (I + P) / 2 has the same stationary law and is aperiodic.
  const Eigen::MatrixXd lazy = 0.5 * (Eigen::MatrixXd::Identity(n, n) + P);
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (long it = 0; it < kPowerMaxIterations; ++it) {
    Eigen::RowVectorXd next = pi * lazy;
    next /= next.sum();
    const double delta = (next - pi).cwiseAbs().maxCoeff();
    pi = next;
    if (delta < kPowerTol) return pi.transpose();
  }
  throw ConvergenceError("stationary distribution: power iteration did not converge");
}

}  // namespace

Eigen::MatrixXd transition_matrix(const SnrLadder& ladder, const SystemConfig& cfg) {
  const int M = cfg.num_sources;
  const int K = cfg.num_levels;
  const double lambda = cfg.lambda;
  const double bar_p = ladder.bar_p_tx;
  const SuccessTable table(ladder.bar_q, M);

  // success_given_buffered[b][x] = P{x* = x | b buffered}
  Eigen::MatrixXd success_given_buffered = Eigen::MatrixXd::Zero(M + 1, K + 1);
  for (int b = 0; b <= M; ++b) {
    for (int x = 0; x <= std::min(b, K); ++x) {
      const int upper = saturates_levels(x, K) ? K : b;
      double s = 0.0;
      for (int i = x; i <= upper; ++i) {
        if (i >= 1 && x > gamma_max(i, K)) continue;
        s += binomial_pmf(b, i, bar_p) * table.any(i, x);
      }
      success_given_buffered(b, x) = s;
    }
  }

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(M + 1, M + 1);
  for (int b = 0; b <= M; ++b) {
    for (int a = 0; a <= M; ++a) {
      double s = 0.0;
      for (int x = std::max(b - a, 0); x <= std::min(b, K); ++x) {
        const int arrivals = a - b + x;
        // Every one of the M-b+x empty buffers draws an arrival independently.
        s += binomial_pmf(M - b + x, arrivals, lambda) * success_given_buffered(b, x);
      }
      P(b, a) = s < 0.0 && s > -1e-14 ? 0.0 : s;
    }
  }
  return P;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition) {
  const Eigen::Index n = transition.rows();
  if (n == 0 || transition.cols() != n) {
    throw std::invalid_argument("stationary_distribution: transition matrix must be square");
  }
  Eigen::MatrixXd A = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (lu.isInvertible()) {
    Eigen::VectorXd pi = clean_distribution(lu.solve(rhs));
    if (pi.allFinite() && fixed_point_residual(pi, transition) <= kResidualTol) return pi;
  }
  Eigen::VectorXd pi = clean_distribution(power_iteration(transition));
  if (fixed_point_residual(pi, transition) > kResidualTol) {
    throw ConvergenceError("stationary distribution: fixed-point residual above tolerance");
  }
  return pi;
}

Eigen::VectorXd conditional_given_u1(const Eigen::VectorXd& stationary) {
  const auto M = static_cast<int>(stationary.size()) - 1;
  Eigen::VectorXd w(M);
  for (int m = 0; m < M; ++m) {
    // By symmetry user 1 is one of the m+1 buffered sources with probability
    // C(M-1, m) / C(M, m+1) = (m+1)/M.
    w[m] = binomial(M - 1, m) / binomial(M, m + 1) * stationary[m + 1];
  }
  const double total = w.sum();
  if (!(total > 0.0)) throw DegenerateConfig("user 1 is never buffered in steady state");
  return w / total;
}

BufferChain build_buffer_chain(const SnrLadder& ladder, const SystemConfig& cfg) {
  BufferChain chain;
  chain.transition = transition_matrix(ladder, cfg);
  chain.stationary = stationary_distribution(chain.transition);
  chain.conditional_given_u1 = conditional_given_u1(chain.stationary);
  return chain;
}

double success_prob_rt(const SnrLadder& ladder, const SystemConfig& cfg, const BufferChain& chain) {
  const int M = cfg.num_sources;
  const int K = cfg.num_levels;
  const double bar_p = ladder.bar_p_tx;
  const SuccessTable table(ladder.bar_q, M);
  double p = 0.0;
  for (int m = 0; m < M; ++m) {
    const double weight = chain.conditional_given_u1[m];
    if (weight == 0.0) continue;
    double kernel = 0.0;
    for (int x = 1; x <= std::min(m + 1, K); ++x) {
      const int upper = saturates_levels(x, K) ? K : m + 1;
      for (int i = x; i <= upper; ++i) {
        if (x > gamma_max(i, K)) continue;
        // User 1 active, i-1 of the m other buffered sources active.
        kernel += bar_p * binomial_pmf(m, i - 1, bar_p) * table.u1(i, x);
      }
    }
    p += kernel * weight;
  }
  return p;
}

double success_prob_rt(const SnrLadder& ladder, const SystemConfig& cfg) {
  return success_prob_rt(ladder, cfg, build_buffer_chain(ladder, cfg));
}

AbsorbingMoments absorbing_moments(double lambda, double p_tilde, double slot_duration) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("absorbing_moments: lambda must be in (0,1]");
  if (!(p_tilde > 0.0 && p_tilde <= 1.0)) {
    throw std::invalid_argument("absorbing_moments: p_tilde must be in (0,1]; absorption never occurs at 0");
  }
  // Transient states: just delivered, empty buffer, holding a packet.
  // I - Q is written out entrywise: forming 1 - (1 - p) loses all precision
  // for tiny p.
  Eigen::Matrix3d IminusQ;
  IminusQ << 1.0, -(1.0 - lambda), -lambda,
             0.0, lambda, -lambda,
             0.0, 0.0, p_tilde;
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d N = IminusQ.triangularView<Eigen::Upper>().solve(I);
  const Eigen::Vector3d v = N * Eigen::Vector3d::Ones();
  const Eigen::Vector3d phi = (2.0 * N - I) * v - v.cwiseProduct(v);

  const double T = slot_duration;
  AbsorbingMoments m;
  m.expected_steps = v[0];
  m.variance_steps = phi[0];
  m.mean_interval = T * (m.expected_steps - 1.0);
  m.second_moment_interval =
      T * T * (m.variance_steps + m.expected_steps * m.expected_steps - 2.0 * m.expected_steps + 1.0);
  m.mean_system_time = T / (lambda + p_tilde - lambda * p_tilde);
  return m;
}

double rt_closed_form_aoi(double lambda, double p_tilde, double slot_duration) {
  const double l = lambda;
  const double p = p_tilde;
  const double T = slot_duration;
  const double system_time = T / (l + p - l * p);
  const double num = 2.0 * (l * l + p * p) - l * p * (3.0 * l + 3.0 * p - l * p - 2.0);
  const double den = 2.0 * l * p * (l + p - l * p);
  return system_time + T * num / den;
}

RtResult average_aoi_rt(const SystemConfig& cfg) {
  if (cfg.lambda == 0.0) throw DegenerateConfig("no arrivals: lambda = 0 makes the AoI unbounded");
  const SnrLadder ladder = configure_snr_ladder(cfg);
  if (!(ladder.bar_p_tx > 0.0)) {
    throw DegenerateConfig("no power-feasible transmissions: effective activation probability is 0");
  }
  const BufferChain chain = build_buffer_chain(ladder, cfg);
  RtResult r;
  r.success_prob = success_prob_rt(ladder, cfg, chain);
  if (!(r.success_prob > 0.0)) throw DegenerateConfig("conditional success probability is zero: AoI unbounded");
  r.moments = absorbing_moments(cfg.lambda, r.success_prob, cfg.slot_duration);
  r.avg_aoi = rt_closed_form_aoi(cfg.lambda, r.success_prob, cfg.slot_duration);
  r.avg_aoi_from_moments =
      r.moments.mean_system_time + r.moments.second_moment_interval / (2.0 * r.moments.mean_interval);
  return r;
}

}  // namespace noma_aoi
