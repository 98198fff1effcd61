#include "dyson/renormalization.hpp"

#include <cmath>
#include <string>

#include "dyson/errors.hpp"

namespace dyson {

namespace {

Site floor_div2(Site x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); }
Site ceil_div2(Site x) { return -floor_div2(-x); }
bool is_even(Site x) { return x % 2 == 0; }

}  // namespace

SpinConfig decimate(const SpinConfig& config) {
  const Volume& v = config.volume();
  const Site first = ceil_div2(v.lo());
  const Site last = floor_div2(v.hi());
  if (first > last) throw DomainError("decimate: volume contains no even site");
  std::vector<Spin> out;
  out.reserve(static_cast<std::size_t>(last - first + 1));
  for (Site k = first; k <= last; ++k) out.push_back(config.at(2 * k));
  return {Volume(first, last), std::move(out)};
}

Spin alternating_value(Site even_site) {
  if (!is_even(even_site)) throw DomainError("alternating_value: site must be even");
  return floor_div2(even_site) % 2 == 0 ? Spin{1} : Spin{-1};
}

Constraint::Constraint(Volume window, std::vector<Spin> values, TailPattern tail)
    : window_(window), values_(std::move(values)), tail_(tail) {
  if (!is_even(window_.lo()) || !is_even(window_.hi())) {
    throw InvariantError("Constraint: window endpoints must be even sites");
  }
  if (static_cast<std::int64_t>(values_.size()) != window_.size() / 2 + 1) {
    throw InvariantError("Constraint: one value per even window site required");
  }
  for (Spin s : values_) {
    if (s != 1 && s != -1) throw InvariantError("Constraint: values must be +1 or -1");
  }
}

Constraint Constraint::alternating(Volume window, TailPattern tail) {
  std::vector<Spin> values;
  for (Site j = window.lo(); j <= window.hi(); j += 2) values.push_back(alternating_value(j));
  return {window, std::move(values), tail};
}

Constraint Constraint::uniform(Volume window, Spin sign, TailPattern tail) {
  return {window, std::vector<Spin>(static_cast<std::size_t>(window.size() / 2 + 1), sign), tail};
}

Spin Constraint::tail_value(Site j) const {
  switch (tail_) {
    case TailPattern::Alternating:
      return alternating_value(j);
    case TailPattern::AllPlus:
      return 1;
    case TailPattern::AllMinus:
      return -1;
  }
  return 1;
}

Spin Constraint::at(Site j) const {
  if (!is_even(j)) throw DomainError("Constraint: site " + std::to_string(j) + " is not even");
  if (window_.contains(j)) return values_[static_cast<std::size_t>((j - window_.lo()) / 2)];
  return tail_value(j);
}

void Constraint::set(Site j, Spin value) {
  if (!is_even(j) || !window_.contains(j)) throw DomainError("Constraint: can only set even window sites");
  if (value != 1 && value != -1) throw InvariantError("Constraint: values must be +1 or -1");
  values_[static_cast<std::size_t>((j - window_.lo()) / 2)] = value;
}

Site hidden_label(Site odd_site) {
  if (is_even(odd_site)) throw DomainError("hidden_label: site must be odd");
  return floor_div2(odd_site - 1);
}

Site odd_site_of(Site label) { return 2 * label + 1; }

std::map<Site, TailValue> effective_field_profile(const Constraint& constraint, const Volume& hidden_vol,
                                                  const CouplingLaw& law, const TailPolicy& policy) {
  if (is_even(hidden_vol.lo()) || is_even(hidden_vol.hi())) {
    throw DomainError("effective_field_profile: hidden volume must start and end on odd sites");
  }
  const Volume& w = constraint.window();
  int tail_pair = 0;
  switch (constraint.tail()) {
    case TailPattern::Alternating:
      tail_pair = 0;  // partners at odd distance 2d apart have opposite signs
      break;
    case TailPattern::AllPlus:
      tail_pair = 2;
      break;
    case TailPattern::AllMinus:
      tail_pair = -2;
      break;
  }

  std::map<Site, TailValue> out;
  for (Site i = hidden_vol.lo(); i <= hidden_vol.hi(); i += 2) {
    double explicit_part = 0.0;
    std::int64_t d = 1;
    for (; i + d <= w.hi() || i - d >= w.lo(); d += 2) {
      const int paired = constraint.at(i + d) + constraint.at(i - d);
      if (paired != 0) explicit_part += paired * law.at_distance(d);
    }
    TailValue field{explicit_part, 0.0};
    if (tail_pair != 0) field += (tail_pair * law.strength()) * odd_tail_sum_certified(law.alpha(), d, policy);
    out.emplace(i, field);
  }
  return out;
}

ModelSpec EffectiveModel::model() const {
  std::map<Site, double> table;
  for (std::size_t a = 0; a < field_table.size(); ++a) table.emplace(hidden_volume.site(a), field_table[a]);
  return {coupling, FieldLaw::explicit_table(std::move(table)), beta};
}

EffectiveModel build_effective_model(const Constraint& constraint, const Volume& hidden_vol, const ModelSpec& model,
                                     const TailPolicy& policy) {
  if (!model.field.is_zero()) {
    throw UnsupportedError("build_effective_model: decimation is only supported for zero-field models");
  }
  const auto profile = effective_field_profile(constraint, hidden_vol, model.coupling, policy);
  const Volume relabeled(hidden_label(hidden_vol.lo()), hidden_label(hidden_vol.hi()));
  const double alpha = model.coupling.alpha();
  EffectiveModel eff{relabeled, CouplingLaw(std::pow(2.0, -alpha) * model.coupling.strength(), alpha), {}, 0.0,
                     model.beta};
  eff.field_table.reserve(profile.size());
  for (const auto& [site, value] : profile) {
    eff.field_table.push_back(value.value);
    eff.field_error += value.error;
  }
  return eff;
}

ProbeGeometry ProbeGeometry::for_alpha(std::int64_t L, double alpha) {
  if (L < 1) throw DomainError("ProbeGeometry: L must be >= 1");
  if (!(alpha > 1.0)) throw DomainError("ProbeGeometry: alpha must exceed 1");
  const double raw = std::pow(static_cast<double>(L), 1.0 / (alpha - 1.0));
  if (!(raw < 1e15)) throw CapacityError("ProbeGeometry: annulus size overflows");
  // snap values that are integers up to rounding before taking the ceiling
  const double nearest = std::round(raw);
  const double snapped = std::abs(raw - nearest) <= 1e-9 * std::max(1.0, nearest) ? nearest : std::ceil(raw);
  const auto N = std::max<std::int64_t>(static_cast<std::int64_t>(snapped), L + 1);
  return {L, N};
}

Constraint probe_constraint(const ProbeGeometry& g, Spin annulus_sign, TailPattern beyond) {
  if (beyond == TailPattern::Alternating) throw DomainError("probe_constraint: beyond-annulus pattern must be uniform");
  const Volume window(-2 * g.N, 2 * g.N);
  std::vector<Spin> values;
  for (Site j = window.lo(); j <= window.hi(); j += 2) {
    values.push_back(std::abs(j) <= 2 * g.L ? alternating_value(j) : annulus_sign);
  }
  return {window, std::move(values), beyond};
}

namespace {

void check_probe_model(const ModelSpec& model) {
  if (!model.field.is_zero()) throw UnsupportedError("discontinuity_probe: model must have zero field");
  const double a = model.coupling.alpha();
  if (!(a > 1.0 && a <= 2.0)) throw DomainError("discontinuity_probe: alpha must lie in (1, 2]");
}

}  // namespace

ProbeEstimate probe_magnetization(const ProbeGeometry& g, Spin annulus_sign, TailPattern beyond,
                                  const ModelSpec& model, const TailPolicy& policy, const ProbeSampler& sampler,
                                  std::uint64_t task) {
  check_probe_model(model);
  const Constraint c = probe_constraint(g, annulus_sign, beyond);
  const Volume hidden(-2 * g.N + 1, 2 * g.N - 1);
  const EffectiveModel eff = build_effective_model(c, hidden, model, policy);
  const PreparedSystem sys =
      prepare_system(eff.hidden_volume, BoundaryCondition::plus(), eff.model(), policy);
  const double certified = sys.certified_error + eff.field_error;

  if (const auto* exact = std::get_if<ExactSampler>(&sampler)) {
    const ExactResult r = enumerate(sys, ExactOptions{false, exact->workers});
    return {r.expectation(0), 0.0, certified};
  }
  const auto& params = std::get<McParams>(sampler);
  const McSystem mc(sys);
  const Observable origin = Observable::spin(0);
  // start from the lowest-energy of the uniform and field-aligned
  // configurations; other starts can freeze in metastable states at low
  // temperature
  std::vector<Spin> aligned(sys.external_field.size());
  for (std::size_t a = 0; a < aligned.size(); ++a) aligned[a] = sys.external_field[a] < 0.0 ? Spin{-1} : Spin{1};
  std::vector<SpinConfig> candidates{SpinConfig::uniform(eff.hidden_volume, 1),
                                     SpinConfig::uniform(eff.hidden_volume, -1),
                                     SpinConfig(eff.hidden_volume, std::move(aligned))};
  std::size_t best = 0;
  double best_energy = 0.0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double e = ChainState(mc, candidates[k], 0).energy(mc);
    if (k == 0 || e < best_energy) {
      best = k;
      best_energy = e;
    }
  }
  const auto stats =
      run_chain(mc, params, std::span(&origin, 1), ChainOptions{task, std::move(candidates[best]), nullptr});
  return {stats[0].mean, stats[0].std_error, certified};
}

ProbeResult discontinuity_probe(const ProbeGeometry& g, TailPattern beyond, const ModelSpec& model,
                                const TailPolicy& policy, const ProbeSampler& sampler) {
  check_probe_model(model);
  if (std::holds_alternative<ExactSampler>(sampler) && 2 * g.N > kMaxEnumerationSites) {
    throw CapacityError("discontinuity_probe: " + std::to_string(2 * g.N) +
                        " hidden sites exceed the exact enumeration limit");
  }
  ProbeResult out;
  out.m_plus = probe_magnetization(g, +1, beyond, model, policy, sampler, 0);
  out.m_minus = probe_magnetization(g, -1, beyond, model, policy, sampler, 1);
  out.gap = out.m_plus.value - out.m_minus.value;
  out.gap_error = std::hypot(out.m_plus.std_error, out.m_minus.std_error);
  return out;
}

double beyond_annulus_sensitivity_bound(const ProbeGeometry& g, const ModelSpec& model, const TailPolicy& policy) {
  const double alpha = model.coupling.alpha();
  const double J = model.coupling.strength();
  double total = 0.0;
  for (Site i = -2 * g.N + 1; i <= 2 * g.N - 1; i += 2) {
    // even sites beyond +-2N: nearest partners at 2N + 2 on each side
    const TailValue right = odd_tail_sum_certified(alpha, 2 * g.N + 2 - i, policy);
    const TailValue left = odd_tail_sum_certified(alpha, i + 2 * g.N + 2, policy);
    total += 2.0 * J * (right.value + left.value + right.error + left.error);
  }
  return model.beta * total;
}

}  // namespace dyson
