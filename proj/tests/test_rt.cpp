#include <doctest.h>

#include <cmath>
#include <random>

#include "noma_aoi/rt_analysis.hpp"
#include "oracles/oracles.hpp"

using namespace noma_aoi;

namespace {

SystemConfig table_cfg(int k, double power_db) {
  SystemConfig c;
  c.num_sources = 8;
  c.num_levels = k;
  c.lambda = 0.5;
  c.p_tx = 0.5;
  c.q = uniform_q(k);
  c.power_budget = db_to_linear(power_db);
  c.rate = 0.2;
  c.slot_duration = 0.5;
  return c;
}

SystemConfig random_cfg(std::mt19937_64& rng, int max_m, int max_k) {
  std::uniform_int_distribution<int> md(1, max_m);
  std::uniform_int_distribution<int> kd(1, max_k);
  std::uniform_real_distribution<double> u(0.02, 1.0);
  SystemConfig c;
  c.num_sources = md(rng);
  c.num_levels = kd(rng);
  c.lambda = u(rng);
  c.p_tx = u(rng);
  std::vector<double> q(c.num_levels);
  double s = 0.0;
  for (auto& v : q) s += (v = u(rng));
  for (auto& v : q) v /= s;
  c.q = q;
  c.power_budget = db_to_linear(-5.0 + 25.0 * u(rng));
  c.slot_duration = 0.1 + 2.0 * u(rng);
  return c;
}

}  // namespace

TEST_CASE("always-arriving traffic refills every buffer") {
  SystemConfig c = table_cfg(3, 10.0);
  c.lambda = 1.0;
  const auto l = configure_snr_ladder(c);
  const auto p = transition_matrix(l, c);
  const int m = c.num_sources;
  for (int b = 0; b <= m; ++b) {
    for (int a = 0; a < m; ++a) CHECK(p(b, a) == 0.0);
    CHECK(p(b, m) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto pi = stationary_distribution(p);
  for (int a = 0; a < m; ++a) CHECK(std::abs(pi(a)) <= 1e-12);
  CHECK(pi(m) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("vanishing arrivals keep the empty state") {
  SystemConfig c = table_cfg(2, 10.0);
  c.lambda = 1e-9;
  const auto p = transition_matrix(configure_snr_ladder(c), c);
  CHECK(p(0, 0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("two-state stationary distribution") {
  Eigen::MatrixXd p(2, 2);
  p << 0.9, 0.1, 0.5, 0.5;
  const auto pi = stationary_distribution(p);
  CHECK(pi(0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(pi(1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("periodic chain falls back and still converges") {
  Eigen::MatrixXd p(2, 2);
  p << 0.0, 1.0, 1.0, 0.0;
  const auto pi = stationary_distribution(p);
  CHECK(pi(0) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("singular system falls back to a fixed point") {
  Eigen::MatrixXd p(3, 3);
  p << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.3, 0.3, 0.4;
  const auto pi = stationary_distribution(p);
  CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((pi.transpose() * p - pi.transpose()).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("single source: conditional success equals effective activation") {
  SystemConfig c = table_cfg(2, 4.0);
  c.num_sources = 1;
  const auto l = configure_snr_ladder(c);
  CHECK(success_prob_rt(l, c) == doctest::Approx(l.bar_p_tx).epsilon(1e-13));
}

TEST_CASE("reference table cells") {
  CHECK(std::abs(average_aoi_rt(table_cfg(2, 20.0)).avg_aoi - 11.0238) <= 5e-4);
  CHECK(std::abs(average_aoi_rt(table_cfg(10, 20.0)).avg_aoi - 2.2486) <= 5e-4);
  CHECK(std::abs(average_aoi_rt(table_cfg(5, -2.0)).avg_aoi - 3.7071) <= 5e-4);
  CHECK(std::abs(average_aoi_rt(table_cfg(9, 4.0)).avg_aoi - 2.6173) <= 5e-4);
}

TEST_CASE("absorbing chain examples") {
  const auto det = absorbing_moments(1.0, 1.0, 0.7);
  CHECK(det.expected_steps == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(det.variance_steps) <= 1e-12);
  CHECK(det.mean_interval == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(det.second_moment_interval == doctest::Approx(0.49).epsilon(1e-13));

  // (I - Q) is upper triangular: v3 = 2, v2 = 4, v1 = 1 + (4 + 2)/2 = 4
  const auto half = absorbing_moments(0.5, 0.5, 1.0);
  CHECK(half.expected_steps == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(half.mean_interval == doctest::Approx(3.0).epsilon(1e-14));

  CHECK_THROWS(absorbing_moments(0.5, 0.0, 1.0));
}

TEST_CASE("absorbing chain closed forms") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 300; ++t) {
    const double lambda = u(rng);
    const double p = u(rng);
    const double slot = 0.1 + u(rng);
    const auto m = absorbing_moments(lambda, p, slot);
    CHECK(std::abs(m.expected_steps - (1.0 / lambda + 1.0 / p)) <= 1e-10 * m.expected_steps);
    CHECK(std::abs(m.mean_interval - slot * (1.0 / lambda + 1.0 / p - 1.0)) <= 1e-12 * m.mean_interval);
    CHECK(m.variance_steps >= 0.0);
    CHECK(m.mean_system_time == doctest::Approx(slot / (1.0 - (1.0 - lambda) * (1.0 - p))).epsilon(1e-12));
    const double composed = m.mean_system_time + m.second_moment_interval / (2.0 * m.mean_interval);
    const double closed = rt_closed_form_aoi(lambda, p, slot);
    CHECK(std::abs(composed - closed) <= 1e-10 * closed);
  }
}

TEST_CASE("saturated arrivals reduce to the no-retransmission form") {
  for (double p : {0.05, 0.3, 0.77, 1.0}) {
    const double slot = 0.5;
    CHECK(std::abs(rt_closed_form_aoi(1.0, p, slot) - slot * (2.0 + p) / (2.0 * p)) <= 1e-12);
  }
  SystemConfig c = table_cfg(3, 7.0);
  c.lambda = 1.0;
  const auto r = average_aoi_rt(c);
  CHECK(std::abs(r.avg_aoi - c.slot_duration * (2.0 + r.success_prob) / (2.0 * r.success_prob)) <= 1e-12);
}

TEST_CASE("chain invariants over random scenarios") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 60; ++t) {
    const auto c = random_cfg(rng, 32, 8);
    const auto l = configure_snr_ladder(c);
    const auto chain = build_buffer_chain(l, c);
    const int n = c.num_sources + 1;
    REQUIRE(chain.transition.rows() == n);
    for (int b = 0; b < n; ++b) {
      CHECK(std::abs(chain.transition.row(b).sum() - 1.0) <= 1e-10);
      CHECK(chain.transition.row(b).minCoeff() >= 0.0);
    }
    CHECK(std::abs(chain.stationary.sum() - 1.0) <= 1e-12);
    const Eigen::RowVectorXd residual = chain.stationary.transpose() * chain.transition - chain.stationary.transpose();
    CHECK(residual.lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(std::abs(chain.conditional_given_u1.sum() - 1.0) <= 1e-10);
    const auto r = average_aoi_rt(c);
    CHECK(std::abs(r.avg_aoi - r.avg_aoi_from_moments) <= 1e-10 * r.avg_aoi);
    CHECK(std::abs(r.moments.expected_steps - (1.0 / c.lambda + 1.0 / r.success_prob)) <= 1e-10 * r.moments.expected_steps);
  }
}

TEST_CASE("lumped product chain matches the buffered-count chain") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int m = 1; m <= 3; ++m) {
    for (int k = 1; k <= 2; ++k) {
      for (int rep = 0; rep < 3; ++rep) {
        SystemConfig c;
        c.num_sources = m;
        c.num_levels = k;
        c.lambda = u(rng);
        c.p_tx = u(rng);
        c.q = k == 1 ? std::vector<double>{1.0} : std::vector<double>{u(rng), 0.0};
        if (k == 2) c.q[1] = 1.0 - c.q[0];
        c.power_budget = db_to_linear(0.0 + 10.0 * u(rng));
        const auto l = configure_snr_ladder(c);
        const auto chain = build_buffer_chain(l, c);
        const auto exact = oracle::product_chain(m, c.lambda, l.bar_p_tx, l.bar_q);
        for (int b = 0; b <= m; ++b) {
          CHECK(std::abs(chain.stationary(b) - exact.lumped[b]) <= 1e-10);
          for (int a = 0; a <= m; ++a) CHECK(std::abs(chain.transition(b, a) - exact.lumped_transition[b][a]) <= 1e-10);
        }
        CHECK(std::abs(success_prob_rt(l, c, chain) - exact.p_tilde) <= 1e-10);
      }
    }
  }
}

TEST_CASE("no arrivals is degenerate") {
  SystemConfig c = table_cfg(2, 20.0);
  c.lambda = 0.0;
  CHECK_THROWS_AS(average_aoi_rt(c), DegenerateConfig);
}
