#pragma once

#include <cstdint>

namespace dyson {

/// Explicit-summation budget and absolute tolerance for infinite lattice sums.
struct TailPolicy {
  std::int64_t horizon = 1'000'000;
  double epsilon = 1e-12;
};

/// A value together with a rigorous bound on its absolute error.
struct TailValue {
  double value = 0.0;
  double error = 0.0;

  TailValue& operator+=(const TailValue& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
  friend TailValue operator+(TailValue a, const TailValue& b) { return a += b; }
  friend TailValue operator*(double s, TailValue v) {
    return {s * v.value, (s < 0 ? -s : s) * v.error};
  }
};

/// sum_{k >= a} k^(-alpha), alpha > 1, a >= 1.
///
/// Terms are added explicitly up to a cut M <= max(a, horizon); the
/// remainder is the midpoint of the integral bounds, int_M^inf + f(M)/2,
/// refined by Euler-Maclaurin corrections whose truncation error is bounded
/// with the Bernoulli-function estimate. The cut grows until the bound is
/// below policy.epsilon; PrecisionError if the horizon is reached first.
/// DomainError for alpha <= 1 or a < 1.
TailValue tail_sum_certified(double alpha, std::int64_t a, const TailPolicy& policy = {});

double tail_sum(double alpha, std::int64_t a, const TailPolicy& policy = {});

/// sum over odd d >= d0 of d^(-alpha); d0 must be odd and positive.
TailValue odd_tail_sum_certified(double alpha, std::int64_t d0, const TailPolicy& policy = {});

/// Riemann zeta at alpha > 1 (the a = 1 tail).
inline double zeta(double alpha, const TailPolicy& policy = {}) { return tail_sum(alpha, 1, policy); }

}  // namespace dyson
