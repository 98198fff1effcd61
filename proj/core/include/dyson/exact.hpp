#pragma once

// Exhaustive evaluation of finite-volume Gibbs kernels
//   gamma_V(s | w) = exp(-beta H_V(s | w)) / Z_V(w)
// for small volumes. These are the ground truth for every sampler test.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dyson/lattice.hpp"

namespace dyson {

inline constexpr std::int64_t kMaxEnumerationSites = 24;
inline constexpr std::int64_t kMaxDominanceSites = 16;

struct ExactResult {
  Volume volume;
  double log_partition;
  /// <s_i> indexed by volume offset.
  std::vector<double> magnetization;
  /// <s_i s_j>, row-major |V| x |V|, when requested.
  std::optional<std::vector<double>> pair_correlations;
  /// Certified error of the boundary fields that entered the weights.
  double certified_error = 0.0;

  double expectation(Site i) const { return magnetization[volume.index(i)]; }
  double correlation(Site i, Site j) const;
};

struct ExactOptions {
  bool pair_correlations = false;
  unsigned workers = 1;
};

/// Partial spin assignment inside a volume.
using SpinEvent = std::map<Site, Spin>;

/// Sums over all 2^|V| configurations in Gray-code order with log-domain
/// accumulation. Throws CapacityError above kMaxEnumerationSites. Results
/// are bit-identical for any worker count.
ExactResult enumerate(const Volume& vol, const BoundaryCondition& bc, const ModelSpec& model,
                      const TailPolicy& policy = {}, const ExactOptions& options = {});

ExactResult enumerate(const PreparedSystem& system, const ExactOptions& options = {});

/// gamma_V(event | bc). Throws DomainError for event sites outside `vol`.
double conditional_probability(const Volume& vol, const BoundaryCondition& bc, const ModelSpec& model,
                               const TailPolicy& policy, const SpinEvent& event);

/// Probability of every configuration; bit a of the index is set when the
/// spin at volume offset a is +1.
std::vector<double> exact_distribution(const PreparedSystem& system);

struct DominanceReport {
  /// Largest amount by which some m_i(w) left [m_i(-), m_i(+)]; 0 if none.
  double max_violation = 0.0;
  std::size_t violations = 0;
  std::size_t checked = 0;
  std::optional<std::size_t> worst_sample;
  std::optional<Site> worst_site;
  std::vector<double> m_plus;
  std::vector<double> m_minus;
};

/// Checks m_i(minus) <= m_i(w) <= m_i(plus) for each sampled boundary w
/// and every site. Violations above `tolerance` are counted, never thrown.
DominanceReport dominance_check(const Volume& vol, const ModelSpec& model, const TailPolicy& policy,
                                std::span<const BoundaryCondition> samples, double tolerance = 1e-10);

}  // namespace dyson
