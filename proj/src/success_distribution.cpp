#include "noma_aoi/success_distribution.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "noma_aoi/numeric.hpp"

namespace noma_aoi {

namespace {

constexpr double kEnumerationBound = 1e7;

// mass_below[k] = sum of bar_q over levels strictly below level k (weaker SNR),
// i.e. 1 - sum_{r<=k} bar_q_r, computed as a suffix sum.
std::vector<double> mass_below(std::span<const double> bar_q) {
  std::vector<double> below(bar_q.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = bar_q.size(); k-- > 0;) {
    below[k] = acc;
    acc += bar_q[k];
  }
  return below;
}

// Probability that `rest` users all land strictly below level k and none of
// them succeeds, i.e. the topmost occupied level among them is in collision.
double silent_below(int rest, std::size_t k, std::span<const double> bar_q,
                    const std::vector<double>& below) {
  if (rest == 0) return 1.0;
  double p = ipow(below[k], rest);
  for (std::size_t n = k + 1; n < bar_q.size(); ++n) {
    p -= rest * bar_q[n] * ipow(below[n], rest - 1);
  }
  return p;
}

// weight[k2] = probability mass of `successes` distinct, ordered users whose
// lowest level is k2: sum over k1 < n_1 < ... < n_{x-2} < k2 of the bar_q
// product (without the x! ordering factor). The middle levels form an
// elementary symmetric polynomial, accumulated as k2 advances.
std::vector<double> chain_weights(int successes, std::span<const double> bar_q) {
  const std::size_t K = bar_q.size();
  std::vector<double> weight(K, 0.0);
  if (successes == 1) {
    weight.assign(bar_q.begin(), bar_q.end());
    return weight;
  }
  const auto inner = static_cast<std::size_t>(successes - 2);
  std::vector<double> esym(inner + 1);
  for (std::size_t k1 = 0; k1 < K; ++k1) {
    std::fill(esym.begin(), esym.end(), 0.0);
    esym[0] = 1.0;
    for (std::size_t k2 = k1 + 1; k2 < K; ++k2) {
      weight[k2] += bar_q[k1] * bar_q[k2] * esym[inner];
      for (std::size_t j = inner; j >= 1; --j) esym[j] += bar_q[k2] * esym[j - 1];
    }
  }
  return weight;
}

// x! * sum_{k2} weight_x[k2] * silent_below(active - x, k2): probability that a
// specific labelled set of x users succeeds (as a group) and the rest stay silent.
double ordered_success_mass(int active, int successes, std::span<const double> bar_q,
                            const std::vector<double>& below) {
  const auto weight = chain_weights(successes, bar_q);
  double s = 0.0;
  for (std::size_t k2 = 0; k2 < bar_q.size(); ++k2) {
    if (weight[k2] == 0.0) continue;
    s += weight[k2] * silent_below(active - successes, k2, bar_q, below);
  }
  return factorial(successes) * s;
}

void check_levels(std::span<const double> bar_q) {
  if (bar_q.empty()) throw std::invalid_argument("bar_q must contain at least one level");
}

void check_range(int active, int successes, int lowest, int num_levels, const char* what) {
  if (active < 1 || successes < lowest || successes > gamma_max(active, num_levels)) {
    throw std::out_of_range(std::string(what) + ": (active=" + std::to_string(active) +
                            ", successes=" + std::to_string(successes) +
                            ") outside the feasible range");
  }
}

// Success flags under SIC for one level assignment; `levels[u]` is the level
// of user u. Deliberately written from the rule, not shared with the simulator.
int count_successes(const std::vector<int>& levels, int num_levels, bool& user1_ok) {
  std::vector<int> occupancy(static_cast<std::size_t>(num_levels), 0);
  for (int lv : levels) ++occupancy[static_cast<std::size_t>(lv)];
  int successes = 0;
  user1_ok = false;
  for (std::size_t u = 0; u < levels.size(); ++u) {
    const int k = levels[u];
    bool ok = occupancy[static_cast<std::size_t>(k)] == 1;
    for (int j = 0; ok && j < k; ++j) ok = occupancy[static_cast<std::size_t>(j)] <= 1;
    if (ok) {
      ++successes;
      if (u == 0) user1_ok = true;
    }
  }
  return successes;
}

}  // namespace

int gamma_max(int active, int num_levels) {
  return fits_within_levels(active, num_levels) ? active : num_levels - 1;
}

bool fits_within_levels(int active, int num_levels) { return active <= num_levels; }

bool saturates_levels(int successes, int num_levels) { return successes == num_levels; }

double beta_u1(int active, int successes, std::span<const double> bar_q) {
  check_levels(bar_q);
  const int K = static_cast<int>(bar_q.size());
  check_range(active, successes, 1, K, "beta_u1");
  if (active == successes + 1) return 0.0;
  const auto below = mass_below(bar_q);
  // Choose the other x-1 winners among the i-1 other users.
  return binomial(active - 1, successes - 1) *
         ordered_success_mass(active, successes, bar_q, below);
}

double beta_any(int active, int successes, std::span<const double> bar_q) {
  check_levels(bar_q);
  const int K = static_cast<int>(bar_q.size());
  check_range(active, successes, 0, K, "beta_any");
  if (active == successes + 1) return 0.0;
  const auto below = mass_below(bar_q);
  if (successes == 0) {
    double top_single = 0.0;
    for (std::size_t k = 0; k < bar_q.size(); ++k) {
      top_single += active * bar_q[k] * ipow(below[k], active - 1);
    }
    return 1.0 - top_single;
  }
  return binomial(active, successes) * ordered_success_mass(active, successes, bar_q, below);
}

double SuccessDistribution::at(int successes) const {
  auto it = values.find(successes);
  return it == values.end() ? 0.0 : it->second;
}

double SuccessDistribution::total() const {
  double t = 0.0;
  for (const auto& [x, p] : values) t += p;
  return t;
}

SuccessDistribution brute_force_success_dist(int active, std::span<const double> bar_q,
                                             bool track_user1) {
  check_levels(bar_q);
  if (active < 1) throw std::invalid_argument("brute_force_success_dist: active must be >= 1");
  const int K = static_cast<int>(bar_q.size());
  if (std::pow(static_cast<double>(K), active) > kEnumerationBound) {
    throw std::invalid_argument("brute_force_success_dist: K^active exceeds the enumeration bound");
  }
  SuccessDistribution dist;
  dist.active = active;
  std::vector<int> levels(static_cast<std::size_t>(active), 0);
  while (true) {
    double w = 1.0;
    for (int lv : levels) w *= bar_q[static_cast<std::size_t>(lv)];
    if (w > 0.0) {
      bool user1_ok = false;
      const int x = count_successes(levels, K, user1_ok);
      if (!track_user1 || user1_ok) dist.values[x] += w;
    }
    // Odometer increment.
    std::size_t pos = 0;
    while (pos < levels.size() && ++levels[pos] == K) levels[pos++] = 0;
    if (pos == levels.size()) break;
  }
  return dist;
}

SuccessTable::SuccessTable(std::span<const double> bar_q, int max_active)
    : num_levels_(static_cast<int>(bar_q.size())), max_active_(max_active) {
  check_levels(bar_q);
  if (max_active < 0) throw std::invalid_argument("SuccessTable: max_active must be >= 0");
  const std::size_t size =
      static_cast<std::size_t>(max_active + 1) * static_cast<std::size_t>(num_levels_ + 1);
  u1_.assign(size, 0.0);
  any_.assign(size, 0.0);
  any_[index(0, 0)] = 1.0;

  const auto below = mass_below(bar_q);
  std::vector<std::vector<double>> weights(static_cast<std::size_t>(num_levels_ + 1));
  for (int x = 1; x <= num_levels_; ++x) weights[static_cast<std::size_t>(x)] = chain_weights(x, bar_q);

  for (int i = 1; i <= max_active; ++i) {
    const int top = gamma_max(i, num_levels_);
    for (int x = 0; x <= top; ++x) {
      if (i == x + 1) continue;
      if (x == 0) {
        double top_single = 0.0;
        for (std::size_t k = 0; k < bar_q.size(); ++k) top_single += i * bar_q[k] * ipow(below[k], i - 1);
        any_[index(i, 0)] = 1.0 - top_single;
        continue;
      }
      double s = 0.0;
      const auto& w = weights[static_cast<std::size_t>(x)];
      for (std::size_t k2 = 0; k2 < bar_q.size(); ++k2) {
        if (w[k2] != 0.0) s += w[k2] * silent_below(i - x, k2, bar_q, below);
      }
      const double ordered = factorial(x) * s;
      u1_[index(i, x)] = binomial(i - 1, x - 1) * ordered;
      any_[index(i, x)] = binomial(i, x) * ordered;
    }
  }
}

}  // namespace noma_aoi
