#pragma once

// Decimation to the even sublattice and the constrained "hidden spin" system.
//
// Conditioning on the even spins leaves the odd spins as a Dyson chain with
// couplings J / (2k)^alpha = 2^-alpha J k^-alpha (k = relabeled distance) in
// the one-body field exerted by the fixed even spins. Odd site i is
// relabeled to floor((i - 1) / 2), so the hidden "origin" is site 1.

#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "dyson/exact.hpp"
#include "dyson/lattice.hpp"
#include "dyson/mc.hpp"

namespace dyson {

/// w'_i = w_{2i} on the even sites of the volume, relabeled to i.
SpinConfig decimate(const SpinConfig& config);

enum class TailPattern { Alternating, AllPlus, AllMinus };

/// (-1)^(k) at even site 2k.
Spin alternating_value(Site even_site);

/// Even-site spins: explicit values in a window, a fixed pattern beyond it.
class Constraint {
 public:
  /// `window` must have even endpoints; `values` lists the window's even
  /// sites from lo to hi.
  Constraint(Volume window, std::vector<Spin> values, TailPattern tail);

  static Constraint alternating(Volume window, TailPattern tail = TailPattern::Alternating);
  static Constraint uniform(Volume window, Spin sign, TailPattern tail);

  const Volume& window() const noexcept { return window_; }
  TailPattern tail() const noexcept { return tail_; }
  /// Spin of even site `j` (window value or tail pattern). DomainError for odd j.
  Spin at(Site j) const;
  /// Replaces the value of an even window site.
  void set(Site j, Spin value);

 private:
  Spin tail_value(Site j) const;

  Volume window_;
  std::vector<Spin> values_;
  TailPattern tail_;
};

Site hidden_label(Site odd_site);
Site odd_site_of(Site label);

/// Field sum_{even j} J w'_j / |i - j|^alpha on every odd site of
/// `hidden_vol` (odd endpoints), keyed by original site. Terms at distance
/// d on both sides are paired before accumulation; the part where both
/// partners lie in the tail is added as a certified odd-distance tail.
std::map<Site, TailValue> effective_field_profile(const Constraint& constraint, const Volume& hidden_vol,
                                                  const CouplingLaw& law, const TailPolicy& policy = {});

struct EffectiveModel {
  /// Relabeled hidden sites.
  Volume hidden_volume;
  /// Strength 2^-alpha J, same exponent.
  CouplingLaw coupling;
  /// Field per relabeled hidden site, in hidden_volume order.
  std::vector<double> field_table;
  double field_error;
  double beta;

  ModelSpec model() const;
};

/// UnsupportedError unless `model` has zero field.
EffectiveModel build_effective_model(const Constraint& constraint, const Volume& hidden_vol, const ModelSpec& model,
                                     const TailPolicy& policy = {});

/// Alternating core of half-width L and an annulus out to N (decimated
/// units), N = ceil(L^(1/(alpha-1))) and at least L + 1.
struct ProbeGeometry {
  std::int64_t L;
  std::int64_t N;

  static ProbeGeometry for_alpha(std::int64_t L, double alpha);
};

/// Constraint used by the probe: alternating on [-2L, 2L], `annulus_sign`
/// on the remaining even sites of [-2N, 2N], `beyond` outside.
Constraint probe_constraint(const ProbeGeometry& geometry, Spin annulus_sign, TailPattern beyond);

struct ExactSampler {
  unsigned workers = 1;
};
using ProbeSampler = std::variant<ExactSampler, McParams>;

struct ProbeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double certified_error = 0.0;
};

/// Magnetization of the hidden origin with hidden spins beyond the window
/// [-2N, 2N] fixed to +1. Chains start from the lowest-energy of the two
/// uniform and the field-aligned configurations.
ProbeEstimate probe_magnetization(const ProbeGeometry& geometry, Spin annulus_sign, TailPattern beyond,
                                  const ModelSpec& model, const TailPolicy& policy, const ProbeSampler& sampler,
                                  std::uint64_t task = 0);

struct ProbeResult {
  ProbeEstimate m_plus;
  ProbeEstimate m_minus;
  double gap = 0.0;
  double gap_error = 0.0;
};

/// M+ and M- for one beyond-annulus pattern. Requires zero field and
/// alpha in (1, 2]; CapacityError if exact enumeration is asked for more
/// than kMaxEnumerationSites hidden spins.
ProbeResult discontinuity_probe(const ProbeGeometry& geometry, TailPattern beyond, const ModelSpec& model,
                                const TailPolicy& policy, const ProbeSampler& sampler);

/// Upper bound on |M(beyond = AllPlus) - M(beyond = AllMinus)|:
/// beta * sum_i |dh_i| over the hidden window, from d<s_0>/dh_i = beta cov <= beta.
double beyond_annulus_sensitivity_bound(const ProbeGeometry& geometry, const ModelSpec& model,
                                        const TailPolicy& policy = {});

}  // namespace dyson
