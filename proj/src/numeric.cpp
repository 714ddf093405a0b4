#include "noma_aoi/numeric.hpp"

#include <cmath>
#include <limits>

namespace noma_aoi {

namespace {

constexpr int kExactBinomialLimit = 60;

std::uint64_t exact_binomial(int n, int k) {
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) {
    // r * (n - i) is divisible by (i + 1); no overflow for n <= 60.
    r = r * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
  }
  return r;
}

}  // namespace

double log_binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (n <= kExactBinomialLimit) return std::log(static_cast<double>(exact_binomial(n, k)));
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0.0;
  if (n <= kExactBinomialLimit) return static_cast<double>(exact_binomial(n, k));
  return std::exp(log_binomial(n, k));
}

double factorial(int n) {
  if (n < 0) return 0.0;
  if (n <= 20) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
  }
  return std::exp(std::lgamma(n + 1.0));
}

double ipow(double x, int e) {
  if (e == 0) return 1.0;
  if (x < 0.0 && x > -1e-15) x = 0.0;
  double result = 1.0;
  double base = x;
  unsigned u = static_cast<unsigned>(e);
  while (u != 0) {
    if (u & 1U) result *= base;
    base *= base;
    u >>= 1U;
  }
  return result;
}

double binomial_pmf(int n, int k, double p) {
  if (n < 0 || k < 0 || k > n) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  if (n <= kExactBinomialLimit) return binomial(n, k) * ipow(p, k) * ipow(1.0 - p, n - k);
  return std::exp(log_binomial(n, k) + k * std::log(p) + (n - k) * std::log1p(-p));
}

}  // namespace noma_aoi
