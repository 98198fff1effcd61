#include "dyson/contour.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dyson/errors.hpp"

namespace dyson {

TriangleConfig::TriangleConfig(Volume volume, std::vector<Triangle> triangles)
    : volume_(volume), triangles_(std::move(triangles)) {
  for (std::size_t k = 0; k < triangles_.size(); ++k) {
    const Triangle& t = triangles_[k];
    if (t.left > t.right) throw InvariantError("TriangleConfig: run with left > right");
    if (!volume_.contains(t.left) || !volume_.contains(t.right)) {
      throw InvariantError("TriangleConfig: run outside the volume");
    }
    if (k > 0 && t.left < triangles_[k - 1].right + 2) {
      throw InvariantError("TriangleConfig: runs must be ordered and separated by a plus site (runs " +
                           std::to_string(k - 1) + " and " + std::to_string(k) + ")");
    }
  }
}

TriangleConfig decompose(const SpinConfig& config) {
  const Volume& v = config.volume();
  std::vector<Triangle> runs;
  for (Site i = v.lo(); i <= v.hi(); ++i) {
    if (config.at(i) > 0) continue;
    if (!runs.empty() && runs.back().right == i - 1) {
      runs.back().right = i;
    } else {
      runs.push_back({i, i});
    }
  }
  return {v, std::move(runs)};
}

SpinConfig reconstruct(const TriangleConfig& triangles) {
  SpinConfig out = SpinConfig::uniform(triangles.volume(), 1);
  for (const Triangle& t : triangles.triangles()) {
    for (Site i = t.left; i <= t.right; ++i) out.set(i, -1);
  }
  return out;
}

TailValue flip_cost_certified(std::int64_t length, const CouplingLaw& law, const TailPolicy& policy) {
  if (length < 1) throw DomainError("flip_cost: interval length must be >= 1");
  // sum_{i in I} [T(i+1) + T(L-i)] = 2 sum_{a=1..L} T(a)
  //                               = 2 (sum_{k<L} k^(1-alpha) + L T(L))
  const double alpha = law.alpha();
  double inner = 0.0;
  for (std::int64_t k = length - 1; k >= 1; --k) inner += std::pow(static_cast<double>(k), 1.0 - alpha);
  const TailValue tail = tail_sum_certified(alpha, length, policy);
  const double scale = 4.0 * law.strength();
  const double value = scale * (inner + static_cast<double>(length) * tail.value);
  const double rounding = static_cast<double>(length + 2) * std::numeric_limits<double>::epsilon() * value;
  return {value, scale * static_cast<double>(length) * tail.error + rounding};
}

double flip_cost(std::int64_t length, const CouplingLaw& law, const TailPolicy& policy) {
  return flip_cost_certified(length, law, policy).value;
}

double field_gain(std::int64_t length, const FieldLaw& field) {
  const auto* decaying = std::get_if<DecayingField>(&field.variant());
  if (!decaying) throw UnsupportedError("field_gain: only defined for decaying fields");
  if (length < 1) throw DomainError("field_gain: interval length must be >= 1");
  double sum = 0.0;
  for (std::int64_t k = length; k >= 2; --k) sum += 2.0 * std::pow(static_cast<double>(k), -decaying->gamma);
  sum += 1.0;  // origin
  return 2.0 * decaying->h * sum;
}

ScalingFit fit_scaling_exponent(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 5) throw DomainError("fit_scaling_exponent: at least 5 samples required");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& [L, value] : samples) {
    if (!(L > 0.0) || !(value > 0.0)) throw DomainError("fit_scaling_exponent: L and values must be positive");
    lo = std::min(lo, L);
    hi = std::max(hi, L);
  }
  if (hi < 100.0 * lo) throw DomainError("fit_scaling_exponent: samples must span at least two decades in L");

  const auto n = static_cast<double>(samples.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [L, value] : samples) {
    mx += std::log(L);
    my += std::log(value);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [L, value] : samples) {
    const double dx = std::log(L) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(value) - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0.0;
  for (const auto& [L, value] : samples) {
    const double r = std::log(value) - intercept - slope * std::log(L);
    rss += r * r;
  }
  return {slope, std::sqrt(rss / (n - 2.0) / sxx), intercept};
}

double peierls_sum(double beta, const CouplingLaw& law, std::int64_t max_mass, const TailPolicy& policy) {
  if (max_mass < 1) throw DomainError("peierls_sum: max_mass must be >= 1");
  if (!(beta >= 0.0)) throw DomainError("peierls_sum: beta must be >= 0");
  double sum = 0.0;
  // ascending order keeps partial sums monotone in max_mass
  for (std::int64_t m = 1; m <= max_mass; ++m) {
    sum += static_cast<double>(m) * std::exp(-beta * flip_cost(m, law, policy));
  }
  return sum;
}

}  // namespace dyson
