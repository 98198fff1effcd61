#pragma once

// Run ("triangle") representation of configurations under plus boundary
// conditions, and the energy balance of flipping an interval against a
// decaying field.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dyson/lattice.hpp"

namespace dyson {

/// Maximal run of minus spins [left, right].
struct Triangle {
  Site left;
  Site right;

  std::int64_t mass() const noexcept { return right - left + 1; }
  friend bool operator==(const Triangle&, const Triangle&) = default;
};

class TriangleConfig {
 public:
  /// InvariantError unless runs are inside `volume`, ordered, and separated
  /// by at least one plus site.
  TriangleConfig(Volume volume, std::vector<Triangle> triangles);

  const Volume& volume() const noexcept { return volume_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }

  friend bool operator==(const TriangleConfig&, const TriangleConfig&) = default;

 private:
  Volume volume_;
  std::vector<Triangle> triangles_;
};

TriangleConfig decompose(const SpinConfig& config);
SpinConfig reconstruct(const TriangleConfig& triangles);

/// 2 sum_{i in I} sum_{j not in I} J / |i-j|^alpha for an interval I of
/// `length` sites in an infinite plus background, with certified error.
TailValue flip_cost_certified(std::int64_t length, const CouplingLaw& law, const TailPolicy& policy = {});
double flip_cost(std::int64_t length, const CouplingLaw& law, const TailPolicy& policy = {});

/// 2 h sum_{|i| <= length-1} (|i|+1)^-gamma. UnsupportedError for
/// non-decaying fields.
double field_gain(std::int64_t length, const FieldLaw& field);

struct ScalingFit {
  double exponent;
  double stderr_exponent;
  double log_prefactor;
};

/// Least-squares slope of log(value) against log(L). Needs >= 5 samples
/// spanning at least two decades in L; DomainError for non-positive values.
ScalingFit fit_scaling_exponent(std::span<const std::pair<double, double>> samples);

/// sum_{m=1..max_mass} m exp(-beta flip_cost(m)): single runs covering the
/// origin. A truncated lower proxy of the full contour sum.
double peierls_sum(double beta, const CouplingLaw& law, std::int64_t max_mass, const TailPolicy& policy = {});

}  // namespace dyson
