#include "dyson/exact.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "dyson/errors.hpp"
#include "dyson/parallel.hpp"

namespace dyson {

namespace {

// Free sites of an enumeration after clamped spins were folded into fields.
struct Reduced {
  std::size_t n;
  double beta;
  std::vector<double> coupling;  // n x n, zero diagonal
  std::vector<double> field;
  double constant_energy;
};

// Running sums scaled by exp(-shift); shift tracks the largest log-weight.
struct Accumulator {
  double shift = -std::numeric_limits<double>::infinity();
  double z = 0.0;
  std::vector<double> m;
  std::vector<double> pair;

  void rescale(double new_shift) {
    const double f = std::exp(shift - new_shift);
    z *= f;
    for (double& x : m) x *= f;
    for (double& x : pair) x *= f;
    shift = new_shift;
  }

  void merge(const Accumulator& o) {
    if (o.z == 0.0) return;
    if (o.shift > shift) rescale(o.shift);
    const double f = std::exp(o.shift - shift);
    z += f * o.z;
    for (std::size_t a = 0; a < m.size(); ++a) m[a] += f * o.m[a];
    for (std::size_t a = 0; a < pair.size(); ++a) pair[a] += f * o.pair[a];
  }
};

constexpr std::size_t partition_bits(std::size_t n) { return n >= 12 ? 4 : 0; }

template <class Visit>
void gray_walk(const Reduced& r, std::size_t partition, std::size_t top_bits, Visit&& visit) {
  const std::size_t n = r.n;
  const std::size_t low = n - top_bits;
  std::vector<Spin> s(n, -1);
  for (std::size_t b = 0; b < top_bits; ++b) {
    if ((partition >> b) & 1U) s[low + b] = 1;
  }
  std::vector<double> local(r.field);
  double energy = r.constant_energy;
  for (std::size_t a = 0; a < n; ++a) {
    double pair = 0.0;
    for (std::size_t b = 0; b < n; ++b) pair += r.coupling[a * n + b] * s[b];
    local[a] += pair;
  }
  for (std::size_t a = 0; a < n; ++a) {
    double row = 0.0;
    for (std::size_t b = a + 1; b < n; ++b) row += r.coupling[a * n + b] * s[b];
    energy -= s[a] * (row + r.field[a]);
  }
  visit(s, energy);
  const std::uint64_t steps = std::uint64_t{1} << low;
  for (std::uint64_t t = 1; t < steps; ++t) {
    const auto k = static_cast<std::size_t>(std::countr_zero(t));
    const double sk = s[k];
    energy += 2.0 * sk * local[k];
    const double* row = &r.coupling[k * n];
    for (std::size_t j = 0; j < n; ++j) local[j] -= 2.0 * sk * row[j];
    s[k] = static_cast<Spin>(-s[k]);
    visit(s, energy);
  }
}

Accumulator accumulate(const Reduced& r, bool pairs, unsigned workers) {
  const std::size_t n = r.n;
  const std::size_t top = partition_bits(n);
  const std::size_t parts = std::size_t{1} << top;
  std::vector<Accumulator> acc(parts);
  parallel_for(parts, workers, [&](std::size_t p) {
    Accumulator& a = acc[p];
    a.m.assign(n, 0.0);
    if (pairs) a.pair.assign(n * n, 0.0);
    gray_walk(r, p, top, [&](const std::vector<Spin>& s, double energy) {
      const double logw = -r.beta * energy;
      if (logw > a.shift) a.rescale(logw);
      const double w = std::exp(logw - a.shift);
      a.z += w;
      for (std::size_t i = 0; i < n; ++i) a.m[i] += w * s[i];
      if (pairs) {
        for (std::size_t i = 0; i < n; ++i) {
          const double wi = w * s[i];
          for (std::size_t j = 0; j < n; ++j) a.pair[i * n + j] += wi * s[j];
        }
      }
    });
  });
  Accumulator total = std::move(acc[0]);
  for (std::size_t p = 1; p < parts; ++p) total.merge(acc[p]);
  return total;
}

// Folds clamped sites (offset -> spin) into fields and a constant.
Reduced reduce(const PreparedSystem& sys, const std::vector<int>& clamp, std::vector<std::size_t>& free_index) {
  const auto n = static_cast<std::size_t>(sys.volume.size());
  free_index.clear();
  for (std::size_t a = 0; a < n; ++a) {
    if (clamp[a] == 0) free_index.push_back(a);
  }
  const std::size_t nf = free_index.size();
  Reduced r{nf, sys.beta, std::vector<double>(nf * nf, 0.0), std::vector<double>(nf, 0.0), 0.0};
  for (std::size_t x = 0; x < nf; ++x) {
    const std::size_t a = free_index[x];
    double h = sys.external_field[a];
    for (std::size_t c = 0; c < n; ++c) {
      if (clamp[c] != 0) h += sys.coupling(a, c) * clamp[c];
    }
    r.field[x] = h;
    for (std::size_t y = 0; y < nf; ++y) {
      if (x != y) r.coupling[x * nf + y] = sys.coupling(a, free_index[y]);
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (clamp[c] == 0) continue;
    double row = 0.0;
    for (std::size_t d = c + 1; d < n; ++d) {
      if (clamp[d] != 0) row += sys.coupling(c, d) * clamp[d];
    }
    r.constant_energy -= clamp[c] * (row + sys.external_field[c]);
  }
  return r;
}

void check_capacity(std::int64_t size, std::int64_t limit, const char* what) {
  if (size > limit) {
    throw CapacityError(std::string(what) + ": volume of " + std::to_string(size) +
                        " sites exceeds the limit of " + std::to_string(limit));
  }
}

double log_partition_clamped(const PreparedSystem& sys, const std::vector<int>& clamp) {
  std::vector<std::size_t> free_index;
  const Reduced r = reduce(sys, clamp, free_index);
  const Accumulator acc = accumulate(r, false, 1);
  return acc.shift + std::log(acc.z);
}

}  // namespace

double ExactResult::correlation(Site i, Site j) const {
  if (!pair_correlations) throw UnsupportedError("pair correlations were not requested");
  const auto n = static_cast<std::size_t>(volume.size());
  return (*pair_correlations)[volume.index(i) * n + volume.index(j)];
}

ExactResult enumerate(const PreparedSystem& system, const ExactOptions& options) {
  check_capacity(system.volume.size(), kMaxEnumerationSites, "enumerate");
  const auto n = static_cast<std::size_t>(system.volume.size());
  std::vector<std::size_t> free_index;
  const Reduced r = reduce(system, std::vector<int>(n, 0), free_index);
  Accumulator acc = accumulate(r, options.pair_correlations, options.workers);

  ExactResult out{system.volume, acc.shift + std::log(acc.z), std::vector<double>(n), std::nullopt,
                  system.certified_error};
  for (std::size_t a = 0; a < n; ++a) out.magnetization[a] = acc.m[a] / acc.z;
  if (options.pair_correlations) {
    std::vector<double> c(n * n);
    for (std::size_t a = 0; a < n * n; ++a) c[a] = acc.pair[a] / acc.z;
    out.pair_correlations = std::move(c);
  }
  return out;
}

ExactResult enumerate(const Volume& vol, const BoundaryCondition& bc, const ModelSpec& model,
                      const TailPolicy& policy, const ExactOptions& options) {
  check_capacity(vol.size(), kMaxEnumerationSites, "enumerate");
  return enumerate(prepare_system(vol, bc, model, policy), options);
}

double conditional_probability(const Volume& vol, const BoundaryCondition& bc, const ModelSpec& model,
                               const TailPolicy& policy, const SpinEvent& event) {
  check_capacity(vol.size(), kMaxEnumerationSites, "conditional_probability");
  for (const auto& [site, spin] : event) {
    if (!vol.contains(site)) {
      throw DomainError("conditional_probability: event site " + std::to_string(site) + " outside the volume");
    }
    if (spin != 1 && spin != -1) throw DomainError("conditional_probability: event spins must be +1 or -1");
  }
  const PreparedSystem sys = prepare_system(vol, bc, model, policy);
  const auto n = static_cast<std::size_t>(vol.size());
  std::vector<int> none(n, 0);
  std::vector<int> clamp(n, 0);
  for (const auto& [site, spin] : event) clamp[vol.index(site)] = spin;
  const double p = std::exp(log_partition_clamped(sys, clamp) - log_partition_clamped(sys, none));
  return std::min(1.0, p);
}

std::vector<double> exact_distribution(const PreparedSystem& system) {
  check_capacity(system.volume.size(), kMaxEnumerationSites, "exact_distribution");
  const auto n = static_cast<std::size_t>(system.volume.size());
  std::vector<double> logw(std::size_t{1} << n);
  std::vector<Spin> s(n);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t state = 0; state < logw.size(); ++state) {
    for (std::size_t a = 0; a < n; ++a) s[a] = ((state >> a) & 1U) ? 1 : -1;
    logw[state] = -system.beta * prepared_energy(system, s);
    top = std::max(top, logw[state]);
  }
  double z = 0.0;
  for (double& w : logw) {
    w = std::exp(w - top);
    z += w;
  }
  for (double& w : logw) w /= z;
  return logw;
}

DominanceReport dominance_check(const Volume& vol, const ModelSpec& model, const TailPolicy& policy,
                                std::span<const BoundaryCondition> samples, double tolerance) {
  check_capacity(vol.size(), kMaxDominanceSites, "dominance_check");
  DominanceReport report;
  report.m_plus = enumerate(vol, BoundaryCondition::plus(), model, policy).magnetization;
  report.m_minus = enumerate(vol, BoundaryCondition::minus(), model, policy).magnetization;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const ExactResult r = enumerate(vol, samples[k], model, policy);
    for (std::size_t a = 0; a < r.magnetization.size(); ++a) {
      const double m = r.magnetization[a];
      const double excess = std::max(report.m_minus[a] - m, m - report.m_plus[a]);
      ++report.checked;
      if (excess > tolerance) ++report.violations;
      if (excess > report.max_violation) {
        report.max_violation = excess;
        report.worst_sample = k;
        report.worst_site = vol.site(a);
      }
    }
  }
  return report;
}

}  // namespace dyson
