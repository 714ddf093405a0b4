#pragma once

#include <cstdint>

namespace noma_aoi {

/// Binomial coefficient C(n, k) as a double; 0 when k < 0, k > n or n < 0.
/// Exact integer arithmetic for n <= 60, log-gamma beyond.
double binomial(int n, int k);

/// Natural log of C(n, k); -inf when the coefficient is 0.
double log_binomial(int n, int k);

/// Binomial probability mass C(n, k) p^k (1-p)^(n-k), with 0^0 = 1.
double binomial_pmf(int n, int k, double p);

double factorial(int n);

/// x^e for a non-negative integer exponent, 0^0 = 1. Negative bases that
/// come from rounding (|x| < 1e-15) are clamped to 0.
double ipow(double x, int e);

}  // namespace noma_aoi
