#include "dyson/lattice.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "dyson/errors.hpp"

namespace dyson {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::int64_t distance(Site i, Site j) { return i > j ? i - j : j - i; }

// Sum over collar spins plus the uniform continuation beyond it, on one side.
TailValue side_field(Site i, const std::optional<SpinConfig>& collar, Site first_outside,
                     int direction, int tail_sign, const CouplingLaw& law, const TailPolicy& policy) {
  TailValue out;
  Site beyond = first_outside;
  if (collar) {
    const auto& v = collar->volume();
    for (Site j = v.lo(); j <= v.hi(); ++j) out.value += collar->at(j) * law.at_distance(distance(i, j));
    beyond = direction > 0 ? v.hi() + 1 : v.lo() - 1;
  }
  if (tail_sign != 0) {
    out += (tail_sign * law.strength()) *
           tail_sum_certified(law.alpha(), distance(i, beyond), policy);
  }
  return out;
}

}  // namespace

Volume::Volume(Site lo, Site hi) : lo_(lo), hi_(hi) {
  if (lo > hi) {
    throw InvariantError("Volume: lo (" + std::to_string(lo) + ") exceeds hi (" + std::to_string(hi) + ")");
  }
}

Volume Volume::centered(std::int64_t size) {
  if (size < 1) throw InvariantError("Volume: size must be >= 1");
  const Site lo = -(size / 2);
  return {lo, lo + size - 1};
}

std::size_t Volume::index(Site i) const {
  if (!contains(i)) {
    throw IndexError("site " + std::to_string(i) + " outside volume [" + std::to_string(lo_) + ", " +
                     std::to_string(hi_) + "]");
  }
  return static_cast<std::size_t>(i - lo_);
}

SpinConfig::SpinConfig(Volume volume, std::vector<Spin> spins) : volume_(volume), spins_(std::move(spins)) {
  if (static_cast<std::int64_t>(spins_.size()) != volume_.size()) {
    throw InvariantError("SpinConfig: spin count does not match volume size");
  }
  for (Spin s : spins_) {
    if (s != 1 && s != -1) throw InvariantError("SpinConfig: spins must be +1 or -1");
  }
}

SpinConfig SpinConfig::uniform(Volume volume, Spin value) {
  return {volume, std::vector<Spin>(static_cast<std::size_t>(volume.size()), value)};
}

void SpinConfig::set(Site i, Spin value) {
  if (value != 1 && value != -1) throw InvariantError("SpinConfig: spins must be +1 or -1");
  spins_[volume_.index(i)] = value;
}

void SpinConfig::flip(Site i) { flip_index(volume_.index(i)); }

SpinConfig SpinConfig::negated() const {
  SpinConfig out = *this;
  for (auto& s : out.spins_) s = static_cast<Spin>(-s);
  return out;
}

CouplingLaw::CouplingLaw(double strength, double alpha) : strength_(strength), alpha_(alpha) {
  if (!(strength > 0.0) || !std::isfinite(strength)) {
    throw DomainError("CouplingLaw: J must be positive (ferromagnetic)");
  }
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw DomainError("CouplingLaw: alpha must exceed 1 for a summable interaction");
  }
}

double CouplingLaw::at_distance(std::int64_t d) const {
  if (d < 1) throw DomainError("CouplingLaw: distance must be >= 1 (no self-coupling)");
  return strength_ * std::pow(static_cast<double>(d), -alpha_);
}

FieldLaw::FieldLaw(Variant v) : law_(std::move(v)) {}

FieldLaw FieldLaw::decaying(double h, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("FieldLaw: decay exponent gamma must be positive");
  return FieldLaw(DecayingField{h, gamma});
}

std::string FieldLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{[&](const ZeroField&) { os << "zero"; },
                        [&](const HomogeneousField& f) { os << "homogeneous(h=" << f.h << ")"; },
                        [&](const DecayingField& f) { os << "decaying(h=" << f.h << ",gamma=" << f.gamma << ")"; },
                        [&](const ExplicitField& f) { os << "explicit(" << f.values.size() << " sites)"; }},
             law_);
  return os.str();
}

BoundaryCondition::BoundaryCondition(Variant v) : bc_(std::move(v)) {
  if (const auto* u = std::get_if<UniformBoundary>(&bc_); u && u->sign != 1 && u->sign != -1) {
    throw InvariantError("BoundaryCondition: uniform sign must be +1 or -1");
  }
  if (const auto* f = std::get_if<FrozenBoundary>(&bc_)) {
    if (f->tail_sign < -1 || f->tail_sign > 1) throw InvariantError("BoundaryCondition: tail sign must be -1, 0 or +1");
  }
}

BoundaryCondition BoundaryCondition::frozen(std::optional<SpinConfig> left, std::optional<SpinConfig> right,
                                            int tail_sign) {
  return BoundaryCondition(FrozenBoundary{std::move(left), std::move(right), tail_sign});
}

void BoundaryCondition::check_against(const Volume& interior) const {
  const auto* f = std::get_if<FrozenBoundary>(&bc_);
  if (!f) return;
  if (f->left && f->left->volume().hi() != interior.lo() - 1) {
    throw DomainError("frozen boundary: left collar must end at site " + std::to_string(interior.lo() - 1));
  }
  if (f->right && f->right->volume().lo() != interior.hi() + 1) {
    throw DomainError("frozen boundary: right collar must start at site " + std::to_string(interior.hi() + 1));
  }
}

int BoundaryCondition::far_sign() const noexcept {
  return std::visit(Overloaded{[](const FreeBoundary&) { return 0; },
                               [](const UniformBoundary& u) { return static_cast<int>(u.sign); },
                               [](const FrozenBoundary& f) { return f.tail_sign; }},
                    bc_);
}

std::string BoundaryCondition::describe() const {
  return std::visit(Overloaded{[](const FreeBoundary&) { return std::string("free"); },
                               [](const UniformBoundary& u) { return std::string(u.sign > 0 ? "plus" : "minus"); },
                               [](const FrozenBoundary& f) {
                                 return "frozen(left=" + std::to_string(f.left ? f.left->size() : 0) +
                                        ",right=" + std::to_string(f.right ? f.right->size() : 0) +
                                        ",tail=" + std::to_string(f.tail_sign) + ")";
                               }},
                    bc_);
}

ModelSpec::ModelSpec(CouplingLaw coupling_, FieldLaw field_, double beta_)
    : coupling(coupling_), field(std::move(field_)), beta(beta_) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("ModelSpec: beta must be finite and >= 0");
}

double pair_coupling(Site i, Site j, const CouplingLaw& law) {
  if (i == j) throw DomainError("pair_coupling: no self-coupling (i == j)");
  return law.at_distance(distance(i, j));
}

double site_field(Site i, const FieldLaw& law) {
  return std::visit(Overloaded{[](const ZeroField&) { return 0.0; },
                               [](const HomogeneousField& f) { return f.h; },
                               [i](const DecayingField& f) {
                                 return f.h * std::pow(static_cast<double>(distance(i, 0) + 1), -f.gamma);
                               },
                               [i](const ExplicitField& f) {
                                 auto it = f.values.find(i);
                                 if (it == f.values.end()) {
                                   throw LookupError("explicit field has no entry for site " + std::to_string(i));
                                 }
                                 return it->second;
                               }},
                    law.variant());
}

TailValue boundary_field_certified(Site i, const Volume& vol, const BoundaryCondition& bc,
                                   const CouplingLaw& law, const TailPolicy& policy) {
  vol.index(i);
  return std::visit(
      Overloaded{[](const FreeBoundary&) { return TailValue{}; },
                 [&](const UniformBoundary& u) {
                   const TailValue left = tail_sum_certified(law.alpha(), i - vol.lo() + 1, policy);
                   const TailValue right = tail_sum_certified(law.alpha(), vol.hi() - i + 1, policy);
                   return (u.sign * law.strength()) * (left + right);
                 },
                 [&](const FrozenBoundary& f) {
                   bc.check_against(vol);
                   return side_field(i, f.left, vol.lo() - 1, -1, f.tail_sign, law, policy) +
                          side_field(i, f.right, vol.hi() + 1, +1, f.tail_sign, law, policy);
                 }},
      bc.variant());
}

double boundary_field(Site i, const Volume& vol, const BoundaryCondition& bc, const CouplingLaw& law,
                      const TailPolicy& policy) {
  return boundary_field_certified(i, vol, bc, law, policy).value;
}

double hamiltonian(const SpinConfig& config, const BoundaryCondition& bc, const ModelSpec& model,
                   const TailPolicy& policy) {
  const Volume& vol = config.volume();
  const auto n = static_cast<std::size_t>(vol.size());
  double pair = 0.0;
  double single = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      pair += config[a] * config[b] * model.coupling.at_distance(static_cast<std::int64_t>(b - a));
    }
    const Site i = vol.site(a);
    single += config[a] * (site_field(i, model.field) + boundary_field(i, vol, bc, model.coupling, policy));
  }
  return -pair - single;
}

double energy_delta(const SpinConfig& config, Site i, const BoundaryCondition& bc, const ModelSpec& model,
                    const TailPolicy& policy) {
  const Volume& vol = config.volume();
  const std::size_t a = vol.index(i);
  double local = site_field(i, model.field) + boundary_field(i, vol, bc, model.coupling, policy);
  for (std::size_t b = 0; b < config.spins().size(); ++b) {
    if (b == a) continue;
    local += config[b] * model.coupling.at_distance(static_cast<std::int64_t>(a > b ? a - b : b - a));
  }
  return 2.0 * config[a] * local;
}

PreparedSystem prepare_system(const Volume& vol, const BoundaryCondition& bc, const ModelSpec& model,
                              const TailPolicy& policy) {
  bc.check_against(vol);
  const auto n = static_cast<std::size_t>(vol.size());
  PreparedSystem sys{vol, model.beta, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0};
  for (std::size_t d = 1; d < n; ++d) sys.coupling_by_distance[d] = model.coupling.at_distance(static_cast<std::int64_t>(d));
  for (std::size_t a = 0; a < n; ++a) {
    const Site i = vol.site(a);
    const TailValue b = boundary_field_certified(i, vol, bc, model.coupling, policy);
    sys.external_field[a] = site_field(i, model.field) + b.value;
    sys.certified_error += b.error;
  }
  return sys;
}

double prepared_energy(const PreparedSystem& system, std::span<const Spin> spins) {
  const std::size_t n = spins.size();
  double pair = 0.0;
  double single = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double row = 0.0;
    for (std::size_t b = a + 1; b < n; ++b) row += spins[b] * system.coupling_by_distance[b - a];
    pair += spins[a] * row;
    single += spins[a] * system.external_field[a];
  }
  return -pair - single;
}

}  // namespace dyson
