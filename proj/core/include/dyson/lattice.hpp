#pragma once

// Finite volumes, spin configurations and the Dyson interaction
//
//   H_V(s | w) = - sum_{i<j in V} J s_i s_j / |i-j|^alpha
//                - sum_{i in V} h_i s_i
//                - sum_{i in V} s_i * b_i(w)
//
// where b_i(w) = sum_{j outside V} J w_j / |i-j|^alpha is the field exerted
// by the exterior prescription w. Infinite exterior sums are evaluated with
// certified tails (see tail_sum.hpp).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dyson/tail_sum.hpp"

namespace dyson {

using Site = std::int64_t;
using Spin = std::int8_t;

/// Closed integer interval [lo, hi] of lattice sites.
class Volume {
 public:
  Volume(Site lo, Site hi);

  /// Interval of `size` sites centred on the origin: [-size/2, size - size/2 - 1].
  static Volume centered(std::int64_t size);

  Site lo() const noexcept { return lo_; }
  Site hi() const noexcept { return hi_; }
  std::int64_t size() const noexcept { return hi_ - lo_ + 1; }
  bool contains(Site i) const noexcept { return i >= lo_ && i <= hi_; }
  /// Zero-based offset of `i`; throws IndexError when outside.
  std::size_t index(Site i) const;
  Site site(std::size_t index) const noexcept { return lo_ + static_cast<Site>(index); }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  Site lo_;
  Site hi_;
};

/// Assignment of +1/-1 spins to every site of a volume.
class SpinConfig {
 public:
  SpinConfig(Volume volume, std::vector<Spin> spins);

  static SpinConfig uniform(Volume volume, Spin value);

  const Volume& volume() const noexcept { return volume_; }
  std::int64_t size() const noexcept { return volume_.size(); }
  std::span<const Spin> spins() const noexcept { return spins_; }

  Spin at(Site i) const { return spins_[volume_.index(i)]; }
  Spin operator[](std::size_t index) const noexcept { return spins_[index]; }
  void set(Site i, Spin value);
  void flip(Site i);
  void flip_index(std::size_t index) noexcept { spins_[index] = static_cast<Spin>(-spins_[index]); }

  /// Global spin flip.
  SpinConfig negated() const;

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

 private:
  Volume volume_;
  std::vector<Spin> spins_;
};

/// Ferromagnetic pair law J / |i-j|^alpha with J > 0 and alpha > 1.
class CouplingLaw {
 public:
  CouplingLaw(double strength, double alpha);

  double strength() const noexcept { return strength_; }
  double alpha() const noexcept { return alpha_; }
  /// J * d^(-alpha) for a distance d >= 1.
  double at_distance(std::int64_t d) const;

  friend bool operator==(const CouplingLaw&, const CouplingLaw&) = default;

 private:
  double strength_;
  double alpha_;
};

struct ZeroField {
  friend bool operator==(const ZeroField&, const ZeroField&) = default;
};
struct HomogeneousField {
  double h;
  friend bool operator==(const HomogeneousField&, const HomogeneousField&) = default;
};
/// h / (|i| + 1)^gamma.
struct DecayingField {
  double h;
  double gamma;
  friend bool operator==(const DecayingField&, const DecayingField&) = default;
};
struct ExplicitField {
  std::map<Site, double> values;
  friend bool operator==(const ExplicitField&, const ExplicitField&) = default;
};

class FieldLaw {
 public:
  using Variant = std::variant<ZeroField, HomogeneousField, DecayingField, ExplicitField>;

  FieldLaw() = default;
  FieldLaw(Variant v);  // NOLINT(google-explicit-constructor)

  static FieldLaw zero() { return FieldLaw(ZeroField{}); }
  static FieldLaw homogeneous(double h) { return FieldLaw(HomogeneousField{h}); }
  static FieldLaw decaying(double h, double gamma);
  static FieldLaw explicit_table(std::map<Site, double> values) {
    return FieldLaw(ExplicitField{std::move(values)});
  }

  const Variant& variant() const noexcept { return law_; }
  bool is_zero() const noexcept { return std::holds_alternative<ZeroField>(law_); }
  std::string describe() const;

  friend bool operator==(const FieldLaw&, const FieldLaw&) = default;

 private:
  Variant law_{ZeroField{}};
};

struct FreeBoundary {
  friend bool operator==(const FreeBoundary&, const FreeBoundary&) = default;
};
struct UniformBoundary {
  Spin sign;
  friend bool operator==(const UniformBoundary&, const UniformBoundary&) = default;
};
/// Explicit exterior spins on the sites adjacent to the volume (left collar
/// ends at lo-1, right collar starts at hi+1), continued by `tail_sign`
/// beyond the collars. A tail sign of 0 leaves the far exterior empty.
struct FrozenBoundary {
  std::optional<SpinConfig> left;
  std::optional<SpinConfig> right;
  int tail_sign = 0;
  friend bool operator==(const FrozenBoundary&, const FrozenBoundary&) = default;
};

class BoundaryCondition {
 public:
  using Variant = std::variant<FreeBoundary, UniformBoundary, FrozenBoundary>;

  BoundaryCondition() = default;
  BoundaryCondition(Variant v);  // NOLINT(google-explicit-constructor)

  static BoundaryCondition free() { return BoundaryCondition(FreeBoundary{}); }
  static BoundaryCondition plus() { return BoundaryCondition(UniformBoundary{+1}); }
  static BoundaryCondition minus() { return BoundaryCondition(UniformBoundary{-1}); }
  static BoundaryCondition frozen(std::optional<SpinConfig> left, std::optional<SpinConfig> right,
                                  int tail_sign);

  const Variant& variant() const noexcept { return bc_; }
  /// Throws DomainError unless the collars sit directly outside `interior`.
  void check_against(const Volume& interior) const;
  /// +1/-1 for uniform conditions, the tail sign for frozen ones, 0 for free.
  int far_sign() const noexcept;
  std::string describe() const;

  friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;

 private:
  Variant bc_{FreeBoundary{}};
};

/// Full interaction at inverse temperature beta (beta multiplies H).
struct ModelSpec {
  CouplingLaw coupling;
  FieldLaw field;
  double beta;

  ModelSpec(CouplingLaw coupling, FieldLaw field, double beta);
};

/// Pair coupling J / |i-j|^alpha. Throws DomainError for i == j.
double pair_coupling(Site i, Site j, const CouplingLaw& law);

/// External field at site i. Throws LookupError for a missing explicit entry.
double site_field(Site i, const FieldLaw& law);

/// Exterior field on site i of `vol` together with its certified error.
TailValue boundary_field_certified(Site i, const Volume& vol, const BoundaryCondition& bc,
                                   const CouplingLaw& law, const TailPolicy& policy);

double boundary_field(Site i, const Volume& vol, const BoundaryCondition& bc,
                      const CouplingLaw& law, const TailPolicy& policy);

/// Finite-volume Hamiltonian with boundary condition; O(|V|^2).
double hamiltonian(const SpinConfig& config, const BoundaryCondition& bc, const ModelSpec& model,
                   const TailPolicy& policy = {});

/// H(config with site i flipped) - H(config). Throws IndexError when i is
/// outside the volume.
double energy_delta(const SpinConfig& config, Site i, const BoundaryCondition& bc,
                    const ModelSpec& model, const TailPolicy& policy = {});

/// Everything a sampler or enumerator needs about one finite system, computed
/// once: couplings by distance and the combined one-body field
/// h_i + b_i for every site.
struct PreparedSystem {
  Volume volume;
  double beta;
  /// coupling_by_distance[d] = J d^-alpha for 1 <= d < |V|; entry 0 unused.
  std::vector<double> coupling_by_distance;
  std::vector<double> external_field;
  /// Sum of certified errors of the boundary fields.
  double certified_error;

  double coupling(std::size_t a, std::size_t b) const noexcept {
    return coupling_by_distance[a > b ? a - b : b - a];
  }
};

PreparedSystem prepare_system(const Volume& vol, const BoundaryCondition& bc, const ModelSpec& model,
                              const TailPolicy& policy = {});

/// Energy of `spins` (indexed like system.volume) under a prepared system.
double prepared_energy(const PreparedSystem& system, std::span<const Spin> spins);

}  // namespace dyson
