#include "dyson/tail_sum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "dyson/errors.hpp"

namespace dyson {

namespace {

// B_2, B_4, ..., B_12
constexpr std::array<double, 6> kBernoulli = {1.0 / 6.0,        -1.0 / 30.0, 1.0 / 42.0,
                                              -1.0 / 30.0,      5.0 / 66.0,  -691.0 / 2730.0};
constexpr int kCorrections = static_cast<int>(kBernoulli.size());
constexpr double kTwoPi = 6.283185307179586;
constexpr double kZeta3 = 1.2020569031595943;
constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

struct Remainder {
  double value;
  double bound;
};

// sum_{k >= m} k^-alpha via the integral midpoint plus Bernoulli corrections.
// Truncation after the B_{2p} term leaves R with
//   |R| <= 2 zeta(2p+1) / (2 pi)^(2p+1) * |f^(2p)(m)|
// because f^(2p) is monotone on [m, inf).
Remainder euler_maclaurin_tail(double alpha, double m) {
  const double f_m = std::pow(m, -alpha);
  double value = m * f_m / (alpha - 1.0) + 0.5 * f_m;

  // |f^(k)(m)| = (alpha)_k m^(-alpha-k); f^(2j-1) < 0, so each correction
  // -B_{2j}/(2j)! f^(2j-1)(m) enters with the sign of B_{2j}.
  double deriv = f_m;
  double factorial = 1.0;
  for (int k = 1; k <= 2 * kCorrections; ++k) {
    deriv *= (alpha + k - 1) / m;
    factorial *= k;
    if (k % 2 == 1) {
      const double next_factorial = factorial * (k + 1);
      value += kBernoulli[static_cast<std::size_t>(k / 2)] / next_factorial * deriv;
    }
  }
  const double bound = 2.0 * kZeta3 / std::pow(kTwoPi, 2 * kCorrections + 1) * deriv;
  return {value, bound + 8.0 * kUnitRoundoff * value};
}

}  // namespace

TailValue tail_sum_certified(double alpha, std::int64_t a, const TailPolicy& policy) {
  if (!(alpha > 1.0)) {
    throw DomainError("tail_sum: series diverges for alpha = " + std::to_string(alpha));
  }
  if (a < 1) throw DomainError("tail_sum: start index must be >= 1");
  if (!(policy.epsilon > 0.0)) throw DomainError("tail_sum: epsilon must be positive");

  const std::int64_t limit = std::max<std::int64_t>(a, policy.horizon);
  std::int64_t cut = a;
  Remainder rem = euler_maclaurin_tail(alpha, static_cast<double>(cut));
  while (rem.bound > 0.5 * policy.epsilon && cut < limit) {
    cut = std::min<std::int64_t>(limit, cut < 16 ? 16 : 2 * cut);
    rem = euler_maclaurin_tail(alpha, static_cast<double>(cut));
  }
  if (rem.bound > policy.epsilon) {
    throw PrecisionError("tail_sum: cannot certify epsilon = " + std::to_string(policy.epsilon) +
                         " within horizon " + std::to_string(policy.horizon));
  }

  // explicit part, smallest terms first
  double partial = 0.0;
  for (std::int64_t k = cut - 1; k >= a; --k) partial += std::pow(static_cast<double>(k), -alpha);
  const double terms = static_cast<double>(cut - a);
  const double rounding = (terms + 2.0) * kUnitRoundoff * (partial + rem.value);
  return {partial + rem.value, rem.bound + rounding};
}

double tail_sum(double alpha, std::int64_t a, const TailPolicy& policy) {
  return tail_sum_certified(alpha, a, policy).value;
}

TailValue odd_tail_sum_certified(double alpha, std::int64_t d0, const TailPolicy& policy) {
  if (d0 < 1 || d0 % 2 == 0) throw DomainError("odd_tail_sum: start must be a positive odd integer");
  // odd terms = all terms - even terms; even terms from d0+1 are 2^-alpha * T((d0+1)/2)
  const TailValue all = tail_sum_certified(alpha, d0, policy);
  const TailValue even = tail_sum_certified(alpha, (d0 + 1) / 2, policy);
  return all + (-std::pow(2.0, -alpha)) * even;
}

}  // namespace dyson
