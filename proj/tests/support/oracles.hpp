#pragma once

// Independent reference computations used only by tests. None of these
// share code paths with the library routines they check: tails come from
// Boost's zeta, Gibbs averages from direct Hamiltonian evaluation of every
// configuration in plain binary order.

#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "dyson/lattice.hpp"

namespace dyson::testing {

/// sum_{k >= a} k^-alpha = zeta(alpha) - sum_{k < a} k^-alpha in long double.
inline long double reference_tail(double alpha, std::int64_t a) {
  long double head = 0.0L;
  for (std::int64_t k = a - 1; k >= 1; --k) head += std::pow(static_cast<long double>(k), -static_cast<long double>(alpha));
  return boost::math::zeta(static_cast<long double>(alpha)) - head;
}

/// Plain partial sum up to `terms` plus the integral midpoint remainder.
inline long double partial_sum_tail(double alpha, std::int64_t a, std::int64_t terms) {
  long double s = 0.0L;
  const std::int64_t last = a + terms - 1;
  for (std::int64_t k = last; k >= a; --k) s += std::pow(static_cast<long double>(k), -static_cast<long double>(alpha));
  const long double m = static_cast<long double>(last + 1);
  const long double f = std::pow(m, -static_cast<long double>(alpha));
  return s + m * f / (alpha - 1.0L) + 0.5L * f;
}

struct BruteForceGibbs {
  long double log_z = 0.0L;
  std::vector<double> magnetization;
  /// probability of each configuration, bit a set = +1 at offset a
  std::vector<double> probability;
};

inline SpinConfig config_from_bits(const Volume& vol, std::uint64_t bits) {
  std::vector<Spin> s(static_cast<std::size_t>(vol.size()));
  for (std::size_t a = 0; a < s.size(); ++a) s[a] = ((bits >> a) & 1U) ? 1 : -1;
  return {vol, std::move(s)};
}

inline BruteForceGibbs brute_force_gibbs(const Volume& vol, const BoundaryCondition& bc, const ModelSpec& model,
                                         const TailPolicy& policy = {}) {
  const auto n = static_cast<std::size_t>(vol.size());
  const std::uint64_t states = std::uint64_t{1} << n;
  std::vector<long double> logw(states);
  long double top = -INFINITY;
  for (std::uint64_t b = 0; b < states; ++b) {
    logw[b] = -static_cast<long double>(model.beta) * hamiltonian(config_from_bits(vol, b), bc, model, policy);
    top = std::max(top, logw[b]);
  }
  long double z = 0.0L;
  std::vector<long double> m(n, 0.0L);
  for (std::uint64_t b = 0; b < states; ++b) {
    const long double w = std::exp(logw[b] - top);
    z += w;
    for (std::size_t a = 0; a < n; ++a) m[a] += ((b >> a) & 1U) ? w : -w;
  }
  BruteForceGibbs out;
  out.log_z = top + std::log(z);
  for (long double x : m) out.magnetization.push_back(static_cast<double>(x / z));
  for (std::uint64_t b = 0; b < states; ++b) out.probability.push_back(static_cast<double>(std::exp(logw[b] - top) / z));
  return out;
}

}  // namespace dyson::testing
