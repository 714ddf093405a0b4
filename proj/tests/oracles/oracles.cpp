#include "oracles.hpp"

#include <cmath>
#include <numeric>

namespace oracle {

double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

std::vector<bool> sic_outcome(const std::vector<int>& levels, int num_levels) {
  std::vector<int> count(num_levels, 0);
  for (int l : levels) ++count[l];
  std::vector<bool> ok(levels.size(), false);
  for (std::size_t u = 0; u < levels.size(); ++u) {
    const int k = levels[u];
    if (count[k] != 1) continue;
    bool clear = true;
    for (int j = 0; j < k; ++j) clear = clear && count[j] <= 1;
    ok[u] = clear;
  }
  return ok;
}

namespace {

// Mass of levels strictly below level k (larger index = weaker).
double below(std::span<const double> q, int k) {
  double s = 0.0;
  for (std::size_t j = k + 1; j < q.size(); ++j) s += q[j];
  return s;
}

// P(e users all land strictly below level k and none of them succeeds),
// i.e. the highest level they occupy (if any) is in collision.
double silent_below(int e, std::span<const double> q, int k) {
  if (e == 0) return 1.0;
  double v = std::pow(below(q, k), e);
  for (std::size_t n = k + 1; n < q.size(); ++n) v -= e * q[n] * std::pow(below(q, static_cast<int>(n)), e - 1);
  return v;
}

// Advances c to the next lexicographic x-combination of {0..K-1}.
bool next_combination(std::vector<int>& c, int num_levels) {
  const int x = static_cast<int>(c.size());
  int pos = x - 1;
  while (pos >= 0 && c[pos] == num_levels - x + pos) --pos;
  if (pos < 0) return false;
  ++c[pos];
  for (int j = pos + 1; j < x; ++j) c[j] = c[j - 1] + 1;
  return true;
}

// Sum over success-level sets {n_1 < ... < n_x} of prod q * silent_below(rest, n_x).
double nested_sum(int i, int x, std::span<const double> q) {
  const int num_levels = static_cast<int>(q.size());
  if (x > num_levels) return 0.0;
  std::vector<int> c(x);
  std::iota(c.begin(), c.end(), 0);
  double total = 0.0;
  do {
    double prod = 1.0;
    for (int l : c) prod *= q[l];
    total += prod * silent_below(i - x, q, c.back());
  } while (next_combination(c, num_levels));
  return total;
}

double factorial(int n) {
  double f = 1.0;
  for (int j = 2; j <= n; ++j) f *= j;
  return f;
}

}  // namespace

double beta_u1_nested(int i, int x, std::span<const double> q) {
  if (x < 1 || x > i) return 0.0;
  return choose(i - 1, x - 1) * factorial(x) * nested_sum(i, x, q);
}

double beta_any_nested(int i, int x, std::span<const double> q) {
  if (x < 0 || x > i) return 0.0;
  if (x == 0) return silent_below(i, q, -1);
  return choose(i, x) * factorial(x) * nested_sum(i, x, q);
}

double nrt_slot_success(int m, double lambda, double bar_p, std::span<const double> q) {
  const int num_levels = static_cast<int>(q.size());
  const double act = lambda * bar_p;
  // choice[n] = -1 inactive, else level.
  std::vector<int> choice(m, -1);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    std::vector<int> levels;
    int node0_index = -1;
    for (int n = 0; n < m; ++n) {
      if (choice[n] < 0) {
        w *= 1.0 - act;
      } else {
        w *= act * q[choice[n]];
        if (n == 0) node0_index = static_cast<int>(levels.size());
        levels.push_back(choice[n]);
      }
    }
    if (node0_index >= 0 && sic_outcome(levels, num_levels)[node0_index]) total += w;
    int pos = 0;
    while (pos < m && choice[pos] == num_levels - 1) choice[pos++] = -1;
    if (pos == m) break;
    ++choice[pos];
  }
  return total;
}

ProductChainResult product_chain(int m, double lambda, double bar_p, std::span<const double> q) {
  const int num_levels = static_cast<int>(q.size());
  const int states = 1 << m;
  std::vector<std::vector<double>> p(states, std::vector<double>(states, 0.0));
  std::vector<double> succ0(states, 0.0);  // P(node 0 delivers | state)

  for (int s = 0; s < states; ++s) {
    std::vector<int> buffered;
    for (int n = 0; n < m; ++n)
      if (s & (1 << n)) buffered.push_back(n);
    const int nb = static_cast<int>(buffered.size());
    std::vector<int> choice(nb, -1);
    while (true) {
      double w = 1.0;
      std::vector<int> levels;
      std::vector<int> who;
      for (int j = 0; j < nb; ++j) {
        if (choice[j] < 0) {
          w *= 1.0 - bar_p;
        } else {
          w *= bar_p * q[choice[j]];
          levels.push_back(choice[j]);
          who.push_back(buffered[j]);
        }
      }
      const auto ok = sic_outcome(levels, num_levels);
      int after = s;
      for (std::size_t u = 0; u < who.size(); ++u) {
        if (!ok[u]) continue;
        after &= ~(1 << who[u]);
        if (who[u] == 0) succ0[s] += w;
      }
      // Arrivals: each node independently gets (or replaces) a packet.
      for (int arr = 0; arr < states; ++arr) {
        double wa = 1.0;
        for (int n = 0; n < m; ++n) wa *= (arr & (1 << n)) ? lambda : 1.0 - lambda;
        p[s][after | arr] += w * wa;
      }
      int pos = 0;
      while (pos < nb && choice[pos] == num_levels - 1) choice[pos++] = -1;
      if (pos == nb) break;
      ++choice[pos];
    }
  }

  std::vector<double> pi(states, 1.0 / states);
  for (int it = 0; it < 200000; ++it) {
    std::vector<double> next(states, 0.0);
    for (int s = 0; s < states; ++s)
      for (int t = 0; t < states; ++t) next[t] += pi[s] * p[s][t];
    // Lazy step guards against periodicity.
    double diff = 0.0;
    for (int s = 0; s < states; ++s) {
      const double v = 0.5 * (pi[s] + next[s]);
      diff = std::max(diff, std::abs(v - pi[s]));
      pi[s] = v;
    }
    if (diff < 1e-15) break;
  }

  ProductChainResult r;
  r.lumped.assign(m + 1, 0.0);
  r.lumped_transition.assign(m + 1, std::vector<double>(m + 1, 0.0));
  std::vector<double> mass(m + 1, 0.0);
  double num = 0.0;
  double den = 0.0;
  for (int s = 0; s < states; ++s) {
    const int b = __builtin_popcount(static_cast<unsigned>(s));
    r.lumped[b] += pi[s];
    mass[b] += pi[s];
    for (int t = 0; t < states; ++t) r.lumped_transition[b][__builtin_popcount(static_cast<unsigned>(t))] += pi[s] * p[s][t];
    if (s & 1) {
      num += pi[s] * succ0[s];
      den += pi[s];
    }
  }
  for (int b = 0; b <= m; ++b)
    for (int a = 0; a <= m; ++a) r.lumped_transition[b][a] = mass[b] > 0 ? r.lumped_transition[b][a] / mass[b] : 0.0;
  r.p_tilde = num / den;
  return r;
}

const std::array<std::array<double, 9>, 9> kTableNrt{{
    {6.8236, 6.0511, 5.9473, 5.9904, 6.0415, 6.0756, 6.0949, 6.1073, 6.1116},
    {6.7646, 5.1606, 4.6720, 4.5221, 4.4752, 4.4596, 4.4540, 4.4513, 4.4505},
    {7.3874, 5.0359, 4.2508, 3.9692, 3.8603, 3.8147, 3.7943, 3.7827, 3.7790},
    {8.2854, 5.1797, 4.1096, 3.7097, 3.5479, 3.4774, 3.4449, 3.4262, 3.4202},
    {9.3341, 5.4584, 4.0977, 3.5812, 3.3688, 3.2751, 3.2316, 3.2063, 3.1982},
    {10.4755, 5.8203, 4.1587, 3.5233, 3.2605, 3.1440, 3.0897, 3.0582, 3.0480},
    {11.6756, 6.2404, 4.2670, 3.5085, 3.1943, 3.0549, 2.9899, 2.9521, 2.9399},
    {12.9129, 6.7041, 4.4091, 3.5227, 3.1556, 2.9929, 2.9170, 2.8729, 2.8587},
    {14.1730, 7.2019, 4.5773, 3.5578, 3.1359, 2.9492, 2.8623, 2.8119, 2.7957},
}};

const std::array<std::array<double, 9>, 9> kTableRt{{
    {5.9874, 6.7062, 8.0248, 9.2250, 10.0484, 10.5345, 10.7995, 10.9672, 11.0238},
    {4.9508, 4.3817, 4.5249, 4.8260, 5.0756, 5.2348, 5.3248, 5.3829, 5.4026},
    {4.9875, 3.8310, 3.5841, 3.6121, 3.6904, 3.7524, 3.7905, 3.8160, 3.8248},
    {5.3280, 3.7071, 3.2246, 3.1113, 3.1057, 3.1209, 3.1340, 3.1439, 3.1476},
    {5.8022, 3.7490, 3.0749, 2.8629, 2.8030, 2.7889, 2.7868, 2.7872, 2.7877},
    {6.3478, 3.8751, 3.0232, 2.7286, 2.6268, 2.5911, 2.5778, 2.5715, 2.5697},
    {6.9348, 4.0520, 3.0257, 2.6549, 2.5169, 2.4631, 2.4408, 2.4290, 2.4254},
    {7.5465, 4.2630, 3.0623, 2.6173, 2.4456, 2.3757, 2.3454, 2.3289, 2.3237},
    {8.1727, 4.4984, 3.1222, 2.6032, 2.3989, 2.3137, 2.2761, 2.2552, 2.2486},
}};

}  // namespace oracle
