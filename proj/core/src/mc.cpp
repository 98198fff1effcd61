#include "dyson/mc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dyson/blocking.hpp"
#include "dyson/errors.hpp"

namespace dyson {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Metropolis:
      return "metropolis";
    case Algorithm::Cluster:
      return "cluster";
    case Algorithm::Hybrid:
      return "hybrid";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "metropolis") return Algorithm::Metropolis;
  if (name == "cluster") return Algorithm::Cluster;
  if (name == "hybrid") return Algorithm::Hybrid;
  throw ConfigError("unknown algorithm '" + name + "' (expected metropolis, cluster or hybrid)", "algorithm");
}

void McParams::validate() const {
  if (burn_in < 0) throw ConfigError("burn_in must be >= 0", "burn_in");
  if (sweeps <= burn_in) throw ConfigError("sweeps must exceed burn_in", "sweeps");
  if (thin < 1) throw ConfigError("thin must be >= 1", "thin");
}

namespace {

const Volume& checked(const Volume& vol) {
  if (vol.size() > kMaxChainSites) {
    throw CapacityError("McSystem: volume of " + std::to_string(vol.size()) + " sites exceeds the limit of " +
                        std::to_string(kMaxChainSites));
  }
  return vol;
}

}  // namespace

McSystem::McSystem(const Volume& vol, const BoundaryCondition& bc, const ModelSpec& model, const TailPolicy& policy)
    : McSystem(prepare_system(checked(vol), bc, model, policy)) {}

McSystem::McSystem(PreparedSystem system) : system_(std::move(system)) {
  checked(system_.volume);
  const std::size_t n = system_.coupling_by_distance.size();
  hazard_.assign(std::max<std::size_t>(n, 1), 0.0);
  for (std::size_t d = 1; d < n; ++d) hazard_[d] = hazard_[d - 1] + 2.0 * system_.beta * system_.coupling_by_distance[d];
}

ChainState::ChainState(const McSystem& system, SpinConfig initial, std::uint64_t stream)
    : config_(std::move(initial)), rng_(stream) {
  if (!(config_.volume() == system.volume())) throw InvariantError("ChainState: initial config volume mismatch");
  const auto& sys = system.system();
  const std::size_t n = system.size();
  local_.assign(sys.external_field.begin(), sys.external_field.end());
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b) local_[a] += sys.coupling(a, b) * config_[b];
    }
  }
}

void ChainState::flip(const McSystem& system, std::size_t index) {
  const auto& coupling = system.system().coupling_by_distance;
  const double delta = -2.0 * config_[index];
  const std::size_t n = local_.size();
  for (std::size_t j = 0; j < index; ++j) local_[j] += delta * coupling[index - j];
  for (std::size_t j = index + 1; j < n; ++j) local_[j] += delta * coupling[j - index];
  config_.flip_index(index);
}

double ChainState::cache_deviation(const McSystem& system) const {
  const ChainState fresh(system, config_, 0);
  double worst = 0.0;
  for (std::size_t a = 0; a < local_.size(); ++a) {
    const double scale = std::max(1.0, std::abs(fresh.local_[a]));
    worst = std::max(worst, std::abs(local_[a] - fresh.local_[a]) / scale);
  }
  return worst;
}

double ChainState::energy(const McSystem& system) const {
  // H = -1/2 sum s_i (L_i + h_i) with h the one-body field
  const auto& field = system.system().external_field;
  double e = 0.0;
  for (std::size_t a = 0; a < local_.size(); ++a) e -= 0.5 * config_[a] * (local_[a] + field[a]);
  return e;
}

std::size_t metropolis_sweep(ChainState& state, const McSystem& system) {
  const double beta = system.beta();
  std::size_t accepted = 0;
  for (std::size_t a = 0; a < system.size(); ++a) {
    const double delta = 2.0 * state.config()[a] * state.local_fields()[a];
    if (delta <= 0.0 || state.rng().uniform() < std::exp(-beta * delta)) {
      state.flip(system, a);
      ++accepted;
    }
  }
  return accepted;
}

ClusterOutcome cluster_update(ChainState& state, const McSystem& system) {
  const std::size_t n = system.size();
  const auto hazard = system.bond_hazard();
  const auto& field = system.system().external_field;
  CounterRng& rng = state.rng();
  const SpinConfig& cfg = state.config();

  std::vector<char> in_cluster(n, 0);
  std::vector<std::size_t> members;
  const auto seed = static_cast<std::size_t>(rng.below(n));
  const Spin orientation = cfg[seed];
  in_cluster[seed] = 1;
  members.push_back(seed);

  // Draws successive bond distances from `origin` in one direction; each
  // distance d carries an independent bond with probability
  // 1 - exp(-2 beta J(d)).
  auto scan = [&](std::size_t origin, std::size_t max_distance, int direction) {
    std::size_t d = 0;
    while (d < max_distance) {
      const double target = hazard[d] - std::log(rng.uniform_open());
      const auto first = hazard.begin() + static_cast<std::ptrdiff_t>(d) + 1;
      const auto last = hazard.begin() + static_cast<std::ptrdiff_t>(max_distance) + 1;
      const auto hit = std::lower_bound(first, last, target);
      if (hit == last) return;
      d = static_cast<std::size_t>(hit - hazard.begin());
      const std::size_t j = direction > 0 ? origin + d : origin - d;
      if (!in_cluster[j] && cfg[j] == orientation) {
        in_cluster[j] = 1;
        members.push_back(j);
      }
    }
  };

  for (std::size_t k = 0; k < members.size(); ++k) {
    const std::size_t i = members[k];
    scan(i, i, -1);
    scan(i, n - 1 - i, +1);
  }

  // Ghost bonds: a member aligned with its one-body field binds with
  // probability 1 - exp(-2 beta |h|); any such bond pins the cluster.
  double aligned = 0.0;
  for (std::size_t i : members) {
    if (orientation * field[i] > 0.0) aligned += std::abs(field[i]);
  }
  ClusterOutcome out{members.size(), false};
  if (aligned == 0.0 || rng.uniform() < std::exp(-2.0 * system.beta() * aligned)) {
    for (std::size_t i : members) state.flip(system, i);
    out.flipped = true;
  }
  return out;
}

void sweep(ChainState& state, const McSystem& system, Algorithm algorithm, std::size_t cluster_moves) {
  switch (algorithm) {
    case Algorithm::Metropolis:
      metropolis_sweep(state, system);
      break;
    case Algorithm::Cluster:
      for (std::size_t k = 0; k < cluster_moves; ++k) cluster_update(state, system);
      break;
    case Algorithm::Hybrid:
      metropolis_sweep(state, system);
      cluster_update(state, system);
      break;
  }
}

std::size_t calibrate_cluster_moves(ChainState& state, const McSystem& system, std::int64_t rounds) {
  if (rounds <= 0) return 1;
  std::int64_t moves = 0;
  for (std::int64_t r = 0; r < rounds; ++r) {
    std::size_t grown = 0;
    while (grown < system.size()) {
      grown += cluster_update(state, system).size;
      ++moves;
    }
  }
  return static_cast<std::size_t>(std::max<std::int64_t>(1, (moves + rounds - 1) / rounds));
}

std::string Observable::id() const {
  switch (kind) {
    case Kind::SiteSpin:
      return "s[" + std::to_string(site) + "]";
    case Kind::Magnetization:
      return "m";
    case Kind::Energy:
      return "energy";
  }
  return "?";
}

std::vector<ChainStats> run_chain(const McSystem& system, const McParams& params,
                                  std::span<const Observable> observables, const ChainOptions& options) {
  params.validate();
  const Volume& vol = system.volume();
  std::vector<std::size_t> offsets(observables.size(), 0);
  for (std::size_t k = 0; k < observables.size(); ++k) {
    if (observables[k].kind == Observable::Kind::SiteSpin) offsets[k] = vol.index(observables[k].site);
  }

  SpinConfig start = options.initial.value_or(SpinConfig::uniform(vol, 1));
  ChainState state(system, std::move(start), stream_id(params.seed, options.task));

  std::size_t moves = 1;
  if (params.algorithm == Algorithm::Cluster) {
    moves = calibrate_cluster_moves(state, system, params.burn_in);
  } else {
    for (std::int64_t s = 0; s < params.burn_in; ++s) sweep(state, system, params.algorithm);
  }

  std::vector<std::vector<double>> series(observables.size());
  const double inv_n = 1.0 / static_cast<double>(system.size());
  for (std::int64_t s = params.burn_in; s < params.sweeps; ++s) {
    sweep(state, system, params.algorithm, moves);
    if ((s - params.burn_in) % params.thin != 0) continue;
    for (std::size_t k = 0; k < observables.size(); ++k) {
      double value = 0.0;
      switch (observables[k].kind) {
        case Observable::Kind::SiteSpin:
          value = state.config()[offsets[k]];
          break;
        case Observable::Kind::Magnetization: {
          double m = 0.0;
          for (Spin x : state.config().spins()) m += x;
          value = m * inv_n;
          break;
        }
        case Observable::Kind::Energy:
          value = state.energy(system);
          break;
      }
      series[k].push_back(value);
      if (options.timeseries) {
        *options.timeseries << s << ',' << observables[k].id() << ',' << value << '\n';
      }
    }
  }

  std::vector<ChainStats> out;
  out.reserve(observables.size());
  for (const auto& x : series) {
    const BlockingResult b = blocking_analysis(x);
    out.push_back({b.mean, b.std_error, b.autocorr_time, static_cast<std::int64_t>(x.size())});
  }
  return out;
}

std::vector<ChainStats> run_chain(const Volume& vol, const BoundaryCondition& bc, const ModelSpec& model,
                                  const TailPolicy& policy, const McParams& params,
                                  std::span<const Observable> observables, const ChainOptions& options) {
  const McSystem system(vol, bc, model, policy);
  if (options.initial) return run_chain(system, params, observables, options);
  ChainOptions with_start = options;
  const int far = bc.far_sign();
  with_start.initial = SpinConfig::uniform(vol, static_cast<Spin>(far < 0 ? -1 : 1));
  return run_chain(system, params, observables, with_start);
}

}  // namespace dyson
