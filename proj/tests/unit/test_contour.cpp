#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dyson/contour.hpp"
#include "dyson/errors.hpp"
#include "support/oracles.hpp"

namespace dyson {
namespace {

std::vector<std::pair<double, double>> log_grid(double lo, double hi, int points) {
  std::vector<std::pair<double, double>> out;
  for (int k = 0; k < points; ++k) {
    out.emplace_back(std::round(lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1))), 0.0);
  }
  return out;
}

TEST(Decompose, Examples) {
  EXPECT_TRUE(decompose(SpinConfig::uniform(Volume(1, 5), 1)).triangles().empty());
  const TriangleConfig one = decompose(SpinConfig(Volume(1, 5), {1, 1, -1, -1, 1}));
  ASSERT_EQ(one.triangles().size(), 1U);
  EXPECT_EQ(one.triangles()[0], (Triangle{3, 4}));
  EXPECT_EQ(one.triangles()[0].mass(), 2);
  const TriangleConfig two = decompose(SpinConfig(Volume(1, 3), {-1, 1, -1}));
  ASSERT_EQ(two.triangles().size(), 2U);
  EXPECT_EQ(two.triangles()[0], (Triangle{1, 1}));
  EXPECT_EQ(two.triangles()[1], (Triangle{3, 3}));
}

TEST(Reconstruct, EmptyAndInvalid) {
  EXPECT_EQ(reconstruct(TriangleConfig(Volume(1, 5), {})), SpinConfig::uniform(Volume(1, 5), 1));
  EXPECT_THROW(TriangleConfig(Volume(1, 5), {{1, 2}, {3, 4}}), InvariantError);
  EXPECT_THROW(TriangleConfig(Volume(1, 5), {{3, 4}, {1, 1}}), InvariantError);
  EXPECT_THROW(TriangleConfig(Volume(1, 5), {{4, 6}}), InvariantError);
  EXPECT_THROW(TriangleConfig(Volume(1, 5), {{3, 2}}), InvariantError);
  EXPECT_NO_THROW(TriangleConfig(Volume(1, 5), {{1, 2}, {4, 5}}));
}

TEST(Decompose, ExhaustiveBijection) {
  const Volume vol(1, 12);
  std::size_t total_mass = 0;
  for (std::uint64_t b = 0; b < (1U << 12); ++b) {
    const SpinConfig c = testing::config_from_bits(vol, b);
    const TriangleConfig t = decompose(c);
    EXPECT_EQ(reconstruct(t), c);
    for (const Triangle& tr : t.triangles()) total_mass += static_cast<std::size_t>(tr.mass());
  }
  // every site is minus in half of all configurations
  EXPECT_EQ(total_mass, 12U * (1U << 11));
}

TEST(Decompose, RandomizedBijection) {
  std::mt19937_64 gen(4);
  for (int k = 0; k < 100000; ++k) {
    const auto n = static_cast<std::int64_t>(1 + gen() % 64);
    const Volume vol(-n / 2, n - 1 - n / 2);
    const SpinConfig c = testing::config_from_bits(vol, gen());
    const TriangleConfig t = decompose(c);
    ASSERT_EQ(reconstruct(t), c);
    ASSERT_EQ(TriangleConfig(vol, t.triangles()), t);
  }
}

TEST(FlipCost, SingleSite) {
  EXPECT_NEAR(flip_cost(1, CouplingLaw(1.0, 2.0)), 6.5797363, 1e-7);
  EXPECT_NEAR(flip_cost(1, CouplingLaw(1.0, 2.0)), 4.0 * static_cast<double>(boost::math::zeta(2.0L)), 1e-12);
  EXPECT_NEAR(flip_cost(1, CouplingLaw(1.0, 1.5)), 10.4495, 1e-4);
  EXPECT_NEAR(flip_cost(1, CouplingLaw(1.0, 1.5)), 4.0 * static_cast<double>(boost::math::zeta(1.5L)), 1e-11);
  EXPECT_THROW(flip_cost(0, CouplingLaw(1.0, 1.5)), DomainError);
}

// 2 J sum_{k=0..L-1} [T(k+1) + T(L-k)] with T from Boost's zeta.
TEST(FlipCost, MatchesDirectDoubleSum) {
  for (double alpha : {1.2, 1.5, 2.0, 2.7}) {
    for (std::int64_t L : {1, 2, 3, 7, 40}) {
      long double ref = 0.0L;
      for (std::int64_t k = 0; k < L; ++k) ref += testing::reference_tail(alpha, k + 1) + testing::reference_tail(alpha, L - k);
      ref *= 2.0L * 0.9L;
      const TailValue got = flip_cost_certified(L, CouplingLaw(0.9, alpha));
      EXPECT_NEAR(got.value, static_cast<double>(ref), 1e-9 * static_cast<double>(ref)) << alpha << ' ' << L;
      EXPECT_LE(std::abs(got.value - static_cast<double>(ref)), got.error + 1e-11 * static_cast<double>(ref));
    }
  }
}

TEST(FlipCost, DoublingRatio) {
  const CouplingLaw law(1.0, 1.5);
  double previous = 0.0;
  for (std::int64_t L = 64; L <= 65536; L *= 4) {
    const double ratio = flip_cost(2 * L, law) / flip_cost(L, law);
    const double deviation = std::abs(ratio - std::sqrt(2.0));
    if (previous > 0.0) EXPECT_LT(deviation, previous);
    previous = deviation;
  }
  EXPECT_LT(previous, 0.02);
}

// Flipping a run inside a plus-boundary volume costs the infinite-volume
// amount: the boundary field carries the whole exterior.
TEST(FlipCost, EnergyConsistency) {
  const ModelSpec model(CouplingLaw(1.0, 1.5), FieldLaw::zero(), 1.0);
  const Volume vol(-60, 60);
  const double base = hamiltonian(SpinConfig::uniform(vol, 1), BoundaryCondition::plus(), model);
  for (std::int64_t m : {1, 4, 11, 30}) {
    const SpinConfig flipped = reconstruct(TriangleConfig(vol, {{-m / 2, -m / 2 + m - 1}}));
    const double diff = hamiltonian(flipped, BoundaryCondition::plus(), model) - base;
    const TailValue cost = flip_cost_certified(m, model.coupling);
    EXPECT_NEAR(diff, cost.value, cost.error + 1e-9 * cost.value) << m;
  }
}

TEST(FieldGain, Examples) {
  EXPECT_DOUBLE_EQ(field_gain(2, FieldLaw::decaying(1.0, 1.0)), 4.0);
  EXPECT_DOUBLE_EQ(field_gain(2, FieldLaw::decaying(1.0, 2.0)), 3.0);
  EXPECT_DOUBLE_EQ(field_gain(1, FieldLaw::decaying(0.37, 0.6)), 2 * 0.37);
  EXPECT_THROW(field_gain(3, FieldLaw::homogeneous(1.0)), UnsupportedError);
  EXPECT_THROW(field_gain(3, FieldLaw::zero()), UnsupportedError);
}

TEST(FieldGain, MatchesFlippingAgainstTheField) {
  const ModelSpec with_field(CouplingLaw(1.0, 1.5), FieldLaw::decaying(0.7, 0.4), 1.0);
  const ModelSpec without(CouplingLaw(1.0, 1.5), FieldLaw::zero(), 1.0);
  const Volume vol(-20, 20);
  const SpinConfig plus = SpinConfig::uniform(vol, 1);
  const auto bc = BoundaryCondition::free();
  for (std::int64_t L : {1, 2, 5, 21}) {
    const SpinConfig flipped = reconstruct(TriangleConfig(vol, {{-(L - 1), L - 1}}));
    const double field_part = (hamiltonian(flipped, bc, with_field) - hamiltonian(plus, bc, with_field)) -
                              (hamiltonian(flipped, bc, without) - hamiltonian(plus, bc, without));
    EXPECT_NEAR(field_part, field_gain(L, with_field.field), 1e-11);
  }
}

TEST(ScalingFit, ExactPowerLaw) {
  auto samples = log_grid(10, 10000, 9);
  for (auto& [L, v] : samples) v = 3.5 * std::pow(L, 0.7);
  const ScalingFit fit = fit_scaling_exponent(samples);
  EXPECT_NEAR(fit.exponent, 0.7, 1e-10);
  EXPECT_NEAR(fit.log_prefactor, std::log(3.5), 1e-9);
  EXPECT_LT(fit.stderr_exponent, 1e-10);
}

TEST(ScalingFit, Preconditions) {
  std::vector<std::pair<double, double>> few = {{1, 1}, {10, 2}, {100, 3}, {1000, 4}};
  EXPECT_THROW(fit_scaling_exponent(few), DomainError);
  few.emplace_back(10000, 0.0);
  EXPECT_THROW(fit_scaling_exponent(few), DomainError);
  std::vector<std::pair<double, double>> narrow = {{10, 1}, {20, 2}, {30, 3}, {40, 4}, {50, 5}};
  EXPECT_THROW(fit_scaling_exponent(narrow), DomainError);
}

TEST(ScalingFit, FlipCostAndFieldGain) {
  auto cost = log_grid(100, 10000, 21);
  for (auto& [L, v] : cost) v = flip_cost(static_cast<std::int64_t>(L), CouplingLaw(1.0, 1.5));
  EXPECT_NEAR(fit_scaling_exponent(cost).exponent, 0.5, 0.05);
  auto gain = log_grid(100, 10000, 21);
  for (auto& [L, v] : gain) v = field_gain(static_cast<std::int64_t>(L), FieldLaw::decaying(1.0, 0.5));
  EXPECT_NEAR(fit_scaling_exponent(gain).exponent, 0.5, 0.05);
}

TEST(Balance, CrossoverDirection) {
  const CouplingLaw law(1.0, 1.5);
  // gamma > alpha - 1: the boundary cost wins and the margin keeps growing
  double previous = -INFINITY;
  for (std::int64_t L = 1000; L <= 10000; L += 1000) {
    const double margin = flip_cost(L, law) - field_gain(L, FieldLaw::decaying(1.0, 0.9));
    EXPECT_GT(margin, previous);
    previous = margin;
  }
  EXPECT_GT(previous, 0.0);
  // gamma < alpha - 1 with a strong field: the field wins and the margin keeps falling
  previous = INFINITY;
  for (std::int64_t L = 1000; L <= 10000; L += 1000) {
    const double margin = flip_cost(L, law) - field_gain(L, FieldLaw::decaying(5.0, 0.2));
    EXPECT_LT(margin, previous);
    previous = margin;
  }
  EXPECT_LT(previous, 0.0);
}

TEST(Peierls, MonotoneAndSmallAtLowTemperature) {
  const CouplingLaw law(1.0, 1.5);
  double last = 0.0;
  for (std::int64_t m = 1; m <= 60; ++m) {
    const double s = peierls_sum(2.0, law, m);
    EXPECT_GE(s, last);
    last = s;
  }
  double prev = INFINITY;
  for (double beta : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double s = peierls_sum(beta, law, 50);
    EXPECT_LT(s, prev);
    prev = s;
  }
  EXPECT_LT(peierls_sum(40.0, law, 50), 1e-150);
  const double baseline = peierls_sum(2.0, law, 50);
  EXPECT_LT(baseline, 0.5);
  long double oracle = 0.0L;
  for (std::int64_t m = 1; m <= 50; ++m) {
    long double cost = 0.0L;
    for (std::int64_t k = 0; k < m; ++k) cost += testing::reference_tail(1.5, k + 1) + testing::reference_tail(1.5, m - k);
    oracle += m * std::exp(-2.0L * 2.0L * cost);
  }
  EXPECT_NEAR(baseline, static_cast<double>(oracle), 1e-10 * baseline);
  EXPECT_NEAR(baseline, 8.3884280405552389e-10, 1e-12 * baseline);
  EXPECT_THROW(peierls_sum(1.0, law, 0), DomainError);
}

}  // namespace
}  // namespace dyson
