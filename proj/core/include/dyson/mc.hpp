#pragma once

// Markov-chain sampling of finite-volume Dyson Gibbs measures.
//
// Two update kernels share one chain state:
//  * Metropolis sweeps propose every site once in order, using a cached
//    local field per site (O(|V|) refresh per accepted flip).
//  * A single-cluster Wolff update for the long-range couplings. Bonds to
//    aligned partners are drawn by inverting the cumulative bond "hazard"
//    2 beta J(d), so each activated bond costs one binary search. Fields
//    and boundary spins act through a ghost spin: if any cluster site
//    aligned with its one-body field binds to the ghost, the cluster stays.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyson/lattice.hpp"
#include "dyson/rng.hpp"

namespace dyson {

/// Largest chain McSystem accepts; the long-range cache is O(|V|) per flip.
inline constexpr std::int64_t kMaxChainSites = 1 << 16;

enum class Algorithm { Metropolis, Cluster, Hybrid };

std::string to_string(Algorithm a);
/// Parses "metropolis", "cluster" or "hybrid"; ConfigError otherwise.
Algorithm parse_algorithm(const std::string& name);

struct McParams {
  Algorithm algorithm = Algorithm::Hybrid;
  std::int64_t sweeps = 10000;
  std::int64_t burn_in = 1000;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless sweeps > burn_in >= 0 and thin >= 1.
  void validate() const;
};

/// Prepared system plus the cumulative bond table of the cluster move.
/// CapacityError above kMaxChainSites sites.
class McSystem {
 public:
  McSystem(const Volume& vol, const BoundaryCondition& bc, const ModelSpec& model, const TailPolicy& policy = {});
  explicit McSystem(PreparedSystem system);

  const PreparedSystem& system() const noexcept { return system_; }
  const Volume& volume() const noexcept { return system_.volume; }
  std::size_t size() const noexcept { return system_.external_field.size(); }
  double beta() const noexcept { return system_.beta; }
  /// hazard[d] = sum_{k=1..d} 2 beta J(k); hazard[0] = 0.
  std::span<const double> bond_hazard() const noexcept { return hazard_; }

 private:
  PreparedSystem system_;
  std::vector<double> hazard_;
};

class ChainState {
 public:
  ChainState(const McSystem& system, SpinConfig initial, std::uint64_t stream);

  const SpinConfig& config() const noexcept { return config_; }
  /// sum_{j != i} J(|i-j|) s_j + h_i + b_i per site.
  std::span<const double> local_fields() const noexcept { return local_; }
  CounterRng& rng() noexcept { return rng_; }
  const CounterRng& rng() const noexcept { return rng_; }

  /// Flips the spin at `index` and refreshes the cache.
  void flip(const McSystem& system, std::size_t index);
  /// Largest relative deviation between cached and recomputed local fields.
  double cache_deviation(const McSystem& system) const;
  /// Energy from the cache, O(|V|).
  double energy(const McSystem& system) const;

 private:
  SpinConfig config_;
  std::vector<double> local_;
  CounterRng rng_;
};

/// One pass of single-site proposals in site order, accepted with
/// probability min(1, exp(-beta dH)). Returns the number of accepted flips.
std::size_t metropolis_sweep(ChainState& state, const McSystem& system);

struct ClusterOutcome {
  std::size_t size = 0;
  bool flipped = false;
};

/// One Wolff cluster grown from a uniformly chosen seed site.
ClusterOutcome cluster_update(ChainState& state, const McSystem& system);

/// Runs one "sweep" of the given algorithm: a Metropolis sweep;
/// `cluster_moves` cluster moves; or a Metropolis sweep followed by one
/// cluster move.
void sweep(ChainState& state, const McSystem& system, Algorithm algorithm, std::size_t cluster_moves = 1);

/// Advances the chain by `rounds` rounds of cluster moves, each round
/// lasting until the grown clusters cover |V| sites, and returns the mean
/// number of moves per round rounded up (at least 1). Letting the move
/// count depend on the clusters themselves biases sampling, so run_chain
/// only does this during burn-in and keeps the count fixed afterwards.
std::size_t calibrate_cluster_moves(ChainState& state, const McSystem& system, std::int64_t rounds);

struct Observable {
  enum class Kind { SiteSpin, Magnetization, Energy };
  Kind kind = Kind::SiteSpin;
  Site site = 0;

  static Observable spin(Site i) { return {Kind::SiteSpin, i}; }
  static Observable magnetization() { return {Kind::Magnetization, 0}; }
  static Observable energy() { return {Kind::Energy, 0}; }
  std::string id() const;
};

struct ChainStats {
  double mean = 0.0;
  double std_error = 0.0;
  double autocorr_time = 0.0;
  std::int64_t n_samples = 0;

  friend bool operator==(const ChainStats&, const ChainStats&) = default;
};

struct ChainOptions {
  /// Stream offset; the chain uses stream_id(params.seed, task).
  std::uint64_t task = 0;
  /// Start configuration. Defaults to all +1; the (volume, bc, ...) overload
  /// of run_chain defaults to the far sign of the boundary instead.
  std::optional<SpinConfig> initial;
  /// Optional CSV time series with columns sweep,observable_id,value.
  std::ostream* timeseries = nullptr;
};

/// Burn-in, then one sample every `thin` sweeps. Deterministic in the seed.
/// Throws ConfigError for invalid params and IndexError for observables
/// outside the volume.
std::vector<ChainStats> run_chain(const McSystem& system, const McParams& params,
                                  std::span<const Observable> observables, const ChainOptions& options = {});

std::vector<ChainStats> run_chain(const Volume& vol, const BoundaryCondition& bc, const ModelSpec& model,
                                  const TailPolicy& policy, const McParams& params,
                                  std::span<const Observable> observables, const ChainOptions& options = {});

}  // namespace dyson
