#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "noma_aoi/system_config.hpp"

namespace noma_aoi {

/// Raised when neither the direct solve nor power iteration yields a
/// stationary distribution (reducible or periodic chain).
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Markov chain over the number of sources holding a packet at slot start
/// under retransmission.
struct BufferChain {
  Eigen::MatrixXd transition;            // (M+1)x(M+1), row b -> column a
  Eigen::VectorXd stationary;            // pi_0 .. pi_M
  Eigen::VectorXd conditional_given_u1;  // P{A_m}, m = 0..M-1 other buffered sources
};

/// Row-stochastic transition matrix of the buffered-count chain: from b
/// buffered sources, x* succeed, then each of the M-b+x* empty sources
/// receives a packet with probability lambda.
Eigen::MatrixXd transition_matrix(const SnrLadder& ladder, const SystemConfig& cfg);

/// Solves pi P = pi, sum(pi) = 1 by replacing one balance equation with the
/// normalization; falls back to power iteration when the system is singular.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition);

/// Distribution of the number of *other* buffered sources, conditioned on
/// user 1 holding a packet.
Eigen::VectorXd conditional_given_u1(const Eigen::VectorXd& stationary);

BufferChain build_buffer_chain(const SnrLadder& ladder, const SystemConfig& cfg);

/// Probability that user 1 transmits successfully in a slot, given that it
/// holds a packet at the start of that slot.
double success_prob_rt(const SnrLadder& ladder, const SystemConfig& cfg, const BufferChain& chain);
double success_prob_rt(const SnrLadder& ladder, const SystemConfig& cfg);

/// Moments of the inter-delivery interval from the four-state absorbing chain
/// (just delivered -> empty / holding -> delivered).
struct AbsorbingMoments {
  double expected_steps = 0.0;          // E{n} from the just-delivered state
  double variance_steps = 0.0;          // var(n)
  double mean_interval = 0.0;           // E{D} = T (E{n} - 1)
  double second_moment_interval = 0.0;  // E{D^2}
  double mean_system_time = 0.0;        // E{S}
};

AbsorbingMoments absorbing_moments(double lambda, double p_tilde, double slot_duration);

/// Closed-form average AoI with retransmission as a function of the arrival
/// probability and the conditional success probability.
double rt_closed_form_aoi(double lambda, double p_tilde, double slot_duration);

struct RtResult {
  double success_prob = 0.0;  // P~1
  AbsorbingMoments moments;
  double avg_aoi = 0.0;               // closed form
  double avg_aoi_from_moments = 0.0;  // E{S} + E{D^2} / (2 E{D})
};

RtResult average_aoi_rt(const SystemConfig& cfg);

}  // namespace noma_aoi
