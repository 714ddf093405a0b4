#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "noma_aoi/numeric.hpp"
#include "noma_aoi/system_config.hpp"

using namespace noma_aoi;

namespace {

SystemConfig scenario(int m, int k, double rate = 0.2, double power = db_to_linear(20.0)) {
  SystemConfig c;
  c.num_sources = m;
  c.num_levels = k;
  c.lambda = 0.5;
  c.p_tx = 0.5;
  c.q = uniform_q(k);
  c.power_budget = power;
  c.rate = rate;
  return c;
}

bool has_violation(const SystemConfig& c, const std::string& msg) {
  for (const auto& v : validate_config(c))
    if (v == msg) return true;
  return false;
}

}  // namespace

TEST_CASE("ladder with R=1 and one level is [1]") {
  for (int m : {1, 3, 50}) {
    const auto l = configure_snr_ladder(scenario(m, 1, 1.0));
    REQUIRE(l.levels.size() == 1);
    CHECK(l.levels[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("ladder R=0.2 K=2 M=8") {
  const auto l = configure_snr_ladder(scenario(8, 2));
  const double base = std::pow(2.0, 0.2) - 1.0;
  CHECK(l.levels[1] == doctest::Approx(0.148698355).epsilon(1e-9));
  CHECK(l.levels[1] == doctest::Approx(base).epsilon(1e-14));
  // (2^R - 1)(1 + 7 (2^R - 1)), evaluated by hand
  CHECK(l.levels[0] == doctest::Approx(0.3034767604).epsilon(1e-9));
  CHECK(l.levels[0] > l.levels[1]);
}

TEST_CASE("huge power budget leaves access probabilities unchanged") {
  auto c = scenario(8, 2, 0.2, 1e9);
  const auto l = configure_snr_ladder(c);
  CHECK(l.bar_p_tx == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(l.bar_q[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(l.bar_q[1] == doctest::Approx(0.5).epsilon(1e-8));
  c.power_budget = std::numeric_limits<double>::infinity();
  const auto inf = configure_snr_ladder(c);
  CHECK(inf.bar_p_tx == 0.5);
}

TEST_CASE("validate_config diagnostics") {
  auto c = scenario(8, 2);
  CHECK(validate_config(c).empty());
  c.q = {0.6, 0.5};
  CHECK(has_violation(c, "q must sum to 1"));
  c = scenario(8, 2);
  c.lambda = 0.0;
  CHECK(has_violation(c, "lambda must be in (0,1]"));
  c = scenario(8, 2);
  c.p_tx = 1.5;
  CHECK(has_violation(c, "p_tx must be in (0,1]"));
  c = scenario(8, 2);
  c.num_sources = 0;
  CHECK(has_violation(c, "M must be >= 1"));
  c = scenario(8, 2);
  c.q = {1.2, -0.2};
  CHECK(has_violation(c, "q entries must be >= 0"));
  c = scenario(8, 2);
  c.q = {1.0};
  CHECK(has_violation(c, "q must have K entries"));
  c = scenario(8, 2);
  c.power_budget = -1.0;
  CHECK(has_violation(c, "power_budget must be positive"));
  c = scenario(8, 2);
  c.rate = 0.0;
  CHECK(has_violation(c, "rate must be positive and finite"));
}

TEST_CASE("configure_snr_ladder rejects invalid scenarios") {
  auto c = scenario(8, 2);
  c.num_levels = 0;
  c.q.clear();
  CHECK_THROWS_AS(configure_snr_ladder(c), InvalidConfig);
  c = scenario(8, 2);
  c.q = {0.3, 0.3};
  CHECK_THROWS_AS(configure_snr_ladder(c), InvalidConfig);
  c = scenario(8, 2);
  c.power_budget = 0.0;
  CHECK_THROWS_AS(configure_snr_ladder(c), InvalidConfig);
  c = scenario(8, 2);
  c.rate = -1.0;
  try {
    configure_snr_ladder(c);
    FAIL("expected InvalidConfig");
  } catch (const InvalidConfig& e) {
    CHECK(std::string(e.what()).find("rate must be positive") != std::string::npos);
  }
}

TEST_CASE("zero-probability level is allowed and unused") {
  auto c = scenario(4, 3);
  c.q = {0.5, 0.0, 0.5};
  const auto l = configure_snr_ladder(c);
  CHECK(l.bar_q[1] == 0.0);
  CHECK(l.bar_q[0] + l.bar_q[2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ladder properties over random scenarios") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> mdist(1, 40);
  std::uniform_int_distribution<int> kdist(1, 8);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 200; ++t) {
    auto c = scenario(mdist(rng), kdist(rng), 0.05 + 2.0 * u(rng), db_to_linear(-5.0 + 30.0 * u(rng)));
    c.p_tx = u(rng);
    std::vector<double> q(c.num_levels);
    for (auto& v : q) v = u(rng);
    const double s = std::accumulate(q.begin(), q.end(), 0.0);
    for (auto& v : q) v /= s;
    c.q = q;
    if (!validate_config(c).empty()) continue;
    const auto l = configure_snr_ladder(c);
    const int k = c.num_levels;
    CHECK(std::accumulate(l.bar_q.begin(), l.bar_q.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    double feasible = 0.0;
    for (int j = 0; j < k; ++j) feasible += c.q[j] * std::exp(-l.levels[j] / c.power_budget);
    CHECK(std::abs(l.bar_p_tx - c.p_tx * feasible) <= 1e-12);
    CHECK(l.bar_p_tx <= c.p_tx);
    CHECK(std::abs(std::log2(1.0 + l.levels[k - 1]) - c.rate) <= 1e-9);
    for (int j = 0; j + 1 < k; ++j) {
      // one source has no interference to climb over: every level is 2^R - 1
      if (c.num_sources >= 2) CHECK(l.levels[j] > l.levels[j + 1]);
      else CHECK(l.levels[j] == l.levels[j + 1]);
      const double r = std::log2(1.0 + l.levels[j] / (1.0 + (c.num_sources - 1) * l.levels[j + 1]));
      CHECK(std::abs(r - c.rate) <= 1e-9);
    }
  }
}

TEST_CASE("more sources raise every level except the lowest") {
  for (int k : {2, 3, 5}) {
    const auto a = configure_snr_ladder(scenario(4, k));
    const auto b = configure_snr_ladder(scenario(5, k));
    for (int j = 0; j + 1 < k; ++j) CHECK(b.levels[j] > a.levels[j]);
    CHECK(b.levels[k - 1] == a.levels[k - 1]);
  }
}

TEST_CASE("attempt probability inversion") {
  auto c = scenario(8, 3, 0.2, db_to_linear(3.0));
  c.p_tx = 0.37;
  const auto l = configure_snr_ladder(c);
  CHECK(attempt_prob_for_effective(l, l.bar_p_tx) == doctest::Approx(0.37).epsilon(1e-13));
}

TEST_CASE("dB conversion") {
  CHECK(db_to_linear(20.0) == doctest::Approx(100.0));
  CHECK(db_to_linear(0.0) == 1.0);
  CHECK(linear_to_db(10.0) == doctest::Approx(10.0));
}

TEST_CASE("numeric helpers") {
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(60, 30) == 118264581564861424.0);
  CHECK(binomial(4, 5) == 0.0);
  CHECK(binomial(4, -1) == 0.0);
  CHECK(binomial(100, 50) == doctest::Approx(1.0089134454556419e29).epsilon(1e-10));
  CHECK(binomial_pmf(3, 0, 0.0) == 1.0);
  CHECK(binomial_pmf(3, 3, 1.0) == 1.0);
  CHECK(binomial_pmf(3, 1, 1.0) == 0.0);
  CHECK(binomial_pmf(4, 2, 0.5) == doctest::Approx(0.375));
  double total = 0.0;
  for (int k = 0; k <= 200; ++k) total += binomial_pmf(200, k, 0.3);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(factorial(5) == 120.0);
  CHECK(ipow(0.0, 0) == 1.0);
  CHECK(ipow(2.0, 10) == 1024.0);
}
