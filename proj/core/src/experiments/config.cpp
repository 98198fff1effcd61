#include "dyson/experiments/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dyson/errors.hpp"
#include "json_node.hpp"

namespace dyson::experiments {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Exact:
      return "exact";
    case ExperimentKind::Mc:
      return "mc";
    case ExperimentKind::Probe:
      return "probe";
    case ExperimentKind::ContourScaling:
      return "contour-scaling";
    case ExperimentKind::PhaseScan:
      return "phase-scan";
    case ExperimentKind::Report:
      return "report";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto k : {ExperimentKind::Exact, ExperimentKind::Mc, ExperimentKind::Probe, ExperimentKind::ContourScaling,
                 ExperimentKind::PhaseScan, ExperimentKind::Report}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'", "experiment");
}

namespace {

void require(bool ok, const std::string& what, const std::string& key) {
  if (!ok) throw ConfigError(what, key);
}

FieldLaw parse_field(Node& parent) {
  if (!parent.has("field")) return FieldLaw::zero();
  const std::string path = parent.key_path("field");
  if (parent.peek("field")->is_string()) {
    const std::string kind = parent.string("field");
    require(kind == "zero", "only \"zero\" may be given as a plain string", path);
    return FieldLaw::zero();
  }
  Node f = parent.child("field");
  const std::string kind = f.string("kind");
  FieldLaw out;
  if (kind == "zero") {
    out = FieldLaw::zero();
  } else if (kind == "homogeneous") {
    out = FieldLaw::homogeneous(f.real("h"));
  } else if (kind == "decaying") {
    const double h = f.real("h");
    const double gamma = f.real("gamma");
    require(gamma > 0.0, "gamma must be positive", f.key_path("gamma"));
    out = FieldLaw::decaying(h, gamma);
  } else if (kind == "explicit") {
    Node values = f.child("values");
    std::map<Site, double> table;
    for (const auto& [key, value] : values.json().items()) {
      Site site = 0;
      std::size_t used = 0;
      try {
        site = std::stoll(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      require(used == key.size() && !key.empty(), "keys must be integer sites", values.key_path(key));
      table[site] = as_real(value, values.key_path(key));
      values.mark_used(key);
    }
    values.finish();
    out = FieldLaw::explicit_table(std::move(table));
  } else {
    throw ConfigError("unknown field kind '" + kind + "' (zero, homogeneous, decaying, explicit)", f.key_path("kind"));
  }
  f.finish();
  return out;
}

ModelSpec parse_model(Node& root) {
  Node m = root.child("model");
  const double J = m.real("J", 1.0);
  require(J > 0.0, "J must be positive", m.key_path("J"));
  const double alpha = m.real("alpha");
  require(alpha > 1.0, "alpha must exceed 1", m.key_path("alpha"));
  const double beta = m.real("beta");
  require(beta >= 0.0, "beta must be non-negative", m.key_path("beta"));
  FieldLaw field = parse_field(m);
  m.finish();
  return {CouplingLaw(J, alpha), std::move(field), beta};
}

Volume parse_volume(Node& root) {
  const std::string path = root.key_path("volume");
  const Json* raw = root.peek("volume");
  if (raw && raw->is_number()) {
    const std::int64_t size = root.integer("volume");
    require(size >= 1, "size must be at least 1", path);
    return Volume::centered(size);
  }
  Node v = root.child("volume");
  Volume out = Volume::centered(1);
  if (v.has("size")) {
    const std::int64_t size = v.integer("size");
    require(size >= 1, "size must be at least 1", v.key_path("size"));
    out = Volume::centered(size);
  } else {
    const std::int64_t lo = v.integer("lo");
    const std::int64_t hi = v.integer("hi");
    require(lo <= hi, "lo must not exceed hi", v.key_path("hi"));
    out = Volume(lo, hi);
  }
  v.finish();
  return out;
}

SpinConfig parse_collar(Node& parent, const std::string& key) {
  Node c = parent.child(key);
  const std::int64_t lo = c.integer("lo");
  const std::string path = c.key_path("spins");
  const Json* spins = c.peek("spins");
  require(spins && spins->is_array() && !spins->empty(), "expected a non-empty array of +1/-1", path);
  c.mark_used("spins");
  std::vector<Spin> values;
  for (std::size_t k = 0; k < spins->size(); ++k) {
    const std::string p = path + "[" + std::to_string(k) + "]";
    const std::int64_t s = as_integer((*spins)[k], p);
    require(s == 1 || s == -1, "spins must be +1 or -1", p);
    values.push_back(static_cast<Spin>(s));
  }
  c.finish();
  return SpinConfig(Volume(lo, lo + static_cast<std::int64_t>(values.size()) - 1), std::move(values));
}

BoundaryCondition parse_boundary(Node& root, const Volume& volume) {
  const std::string path = root.key_path("boundary");
  BoundaryCondition out;
  const Json* raw = root.peek("boundary");
  if (raw && raw->is_string()) {
    const std::string kind = root.string("boundary");
    if (kind == "plus") {
      out = BoundaryCondition::plus();
    } else if (kind == "minus") {
      out = BoundaryCondition::minus();
    } else if (kind == "free") {
      out = BoundaryCondition::free();
    } else {
      throw ConfigError("unknown boundary '" + kind + "' (plus, minus, free or a frozen object)", path);
    }
    return out;
  }
  Node b = root.child("boundary");
  const std::string kind = b.string("kind");
  require(kind == "frozen", "object boundaries must have kind \"frozen\"", b.key_path("kind"));
  std::optional<SpinConfig> left;
  std::optional<SpinConfig> right;
  if (b.has("left")) left = parse_collar(b, "left");
  if (b.has("right")) right = parse_collar(b, "right");
  const std::int64_t tail = b.integer("tail_sign", 0);
  require(tail >= -1 && tail <= 1, "tail_sign must be -1, 0 or 1", b.key_path("tail_sign"));
  b.finish();
  try {
    out = BoundaryCondition::frozen(std::move(left), std::move(right), static_cast<int>(tail));
    out.check_against(volume);
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), path);
  }
  return out;
}

McParams parse_mc(Node& s) {
  McParams p;
  try {
    p.algorithm = parse_algorithm(s.string("algorithm", "hybrid"));
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), s.key_path("algorithm"));
  }
  p.sweeps = s.integer("sweeps", p.sweeps);
  p.burn_in = s.integer("burn_in", p.burn_in);
  p.thin = s.integer("thin", p.thin);
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), s.key_path(e.key()));
  }
  s.finish();
  return p;
}

/// "exact" or an MC parameter object.
std::optional<McParams> parse_sampler(Node& root, bool exact_allowed) {
  const std::string path = root.key_path("sampler");
  if (!root.has("sampler")) {
    if (exact_allowed) return std::nullopt;
    throw ConfigError("required key is missing", path);
  }
  if (root.peek("sampler")->is_string()) {
    const std::string name = root.string("sampler");
    require(exact_allowed && name == "exact", exact_allowed ? "expected \"exact\" or an object" : "expected an object",
            path);
    return std::nullopt;
  }
  Node s = root.child("sampler");
  return parse_mc(s);
}

Observable parse_observable(const std::string& id, const std::string& path) {
  if (id == "m") return Observable::magnetization();
  if (id == "energy") return Observable::energy();
  if (id.size() > 3 && id.starts_with("s[") && id.back() == ']') {
    const std::string inner = id.substr(2, id.size() - 3);
    std::size_t used = 0;
    Site site = 0;
    try {
      site = std::stoll(inner, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == inner.size()) return Observable::spin(site);
  }
  throw ConfigError("unknown observable '" + id + "' (m, energy or s[i])", path);
}

TailPolicy parse_tail(Node& root) {
  TailPolicy p;
  auto t = root.optional_child("tail");
  if (!t) return p;
  p.horizon = t->integer("horizon", p.horizon);
  require(p.horizon >= 1, "horizon must be at least 1", t->key_path("horizon"));
  p.epsilon = t->real("epsilon", p.epsilon);
  require(p.epsilon > 0.0, "epsilon must be positive", t->key_path("epsilon"));
  t->finish();
  return p;
}

std::vector<std::int64_t> parse_L(Node& root, std::int64_t min_value) {
  const std::string path = root.key_path("L");
  std::vector<std::int64_t> out;
  const Json* raw = root.peek("L");
  if (raw && raw->is_object()) {
    Node g = root.child("L");
    const double from = g.real("from");
    const double to = g.real("to");
    const std::int64_t points = g.integer("points");
    require(from >= static_cast<double>(min_value) && to > from, "need from >= " + std::to_string(min_value) + " and to > from", path);
    require(points >= 2, "points must be at least 2", g.key_path("points"));
    g.finish();
    // log-spaced, rounded, duplicates dropped
    for (std::int64_t k = 0; k < points; ++k) {
      const double x = from * std::pow(to / from, static_cast<double>(k) / static_cast<double>(points - 1));
      const auto L = static_cast<std::int64_t>(std::llround(x));
      if (out.empty() || out.back() != L) out.push_back(L);
    }
    return out;
  }
  out = root.integers("L");
  for (std::int64_t L : out) require(L >= min_value, "L values must be at least " + std::to_string(min_value), path);
  return out;
}

ExactSpec parse_exact(Node& root) {
  ModelSpec model = parse_model(root);
  const Volume vol = parse_volume(root);
  return {std::move(model), vol, parse_boundary(root, vol)};
}

McSpec parse_mc_spec(Node& root) {
  ModelSpec model = parse_model(root);
  const Volume vol = parse_volume(root);
  BoundaryCondition bc = parse_boundary(root, vol);
  McSpec spec{std::move(model), vol, std::move(bc), *parse_sampler(root, false), {}, 1, {}};
  const std::string opath = root.key_path("observables");
  const std::vector<std::string> ids = root.has("observables") ? root.strings("observables") : std::vector<std::string>{"s[0]", "m"};
  require(!ids.empty(), "expected at least one observable", opath);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const std::string p = opath + "[" + std::to_string(k) + "]";
    const Observable o = parse_observable(ids[k], p);
    require(o.kind != Observable::Kind::SiteSpin || vol.contains(o.site), "site outside the volume", p);
    spec.observables.push_back(o);
  }
  spec.replicas = root.integer("replicas", 1);
  require(spec.replicas >= 1, "replicas must be at least 1", root.key_path("replicas"));
  spec.timeseries = root.string("timeseries", "");
  require(spec.timeseries.empty() || spec.replicas == 1, "a time series needs replicas = 1", root.key_path("timeseries"));
  return spec;
}

ProbeSpec parse_probe(Node& root) {
  ModelSpec model = parse_model(root);
  require(model.field.is_zero(), "the probe needs a zero field", root.key_path("model") + ".field");
  require(model.coupling.alpha() <= 2.0, "the probe needs alpha in (1, 2]", root.key_path("model") + ".alpha");
  ProbeSpec spec{std::move(model), parse_L(root, 1), {}, std::nullopt};
  const std::vector<std::string> beyond =
      root.has("beyond") ? root.strings("beyond") : std::vector<std::string>{"plus", "minus"};
  for (std::size_t k = 0; k < beyond.size(); ++k) {
    if (beyond[k] == "plus") {
      spec.beyond.push_back(TailPattern::AllPlus);
    } else if (beyond[k] == "minus") {
      spec.beyond.push_back(TailPattern::AllMinus);
    } else {
      throw ConfigError("expected \"plus\" or \"minus\"", root.key_path("beyond") + "[" + std::to_string(k) + "]");
    }
  }
  require(!spec.beyond.empty(), "expected at least one pattern", root.key_path("beyond"));
  spec.mc = parse_sampler(root, true);
  return spec;
}

ContourSpec parse_contour(Node& root) {
  ContourSpec spec;
  spec.J = root.real("J", 1.0);
  require(spec.J > 0.0, "J must be positive", root.key_path("J"));
  if (root.has("alphas")) spec.alphas = root.reals("alphas");
  for (double a : spec.alphas) require(a > 1.0, "alpha values must exceed 1", root.key_path("alphas"));
  if (root.has("gammas")) spec.gammas = root.reals("gammas");
  for (double g : spec.gammas) require(g > 0.0, "gamma values must be positive", root.key_path("gammas"));
  require(!spec.alphas.empty() || !spec.gammas.empty(), "give alphas, gammas or both", root.key_path("alphas"));
  spec.h = root.real("h", 1.0);
  require(spec.h > 0.0, "h must be positive", root.key_path("h"));
  spec.L = parse_L(root, 1);
  if (auto p = root.optional_child("peierls")) {
    spec.peierls_betas = p->reals("betas");
    for (double b : spec.peierls_betas) require(b >= 0.0, "beta values must be non-negative", p->key_path("betas"));
    spec.peierls_max_mass = p->integer("max_mass", spec.peierls_max_mass);
    require(spec.peierls_max_mass >= 1, "max_mass must be at least 1", p->key_path("max_mass"));
    p->finish();
    require(!spec.alphas.empty(), "peierls sums need alphas", p->path());
  }
  return spec;
}

PhaseScanSpec parse_phase_scan(Node& root) {
  PhaseScanSpec spec;
  spec.J = root.real("J", 1.0);
  require(spec.J > 0.0, "J must be positive", root.key_path("J"));
  spec.alphas = root.reals("alphas");
  spec.gammas = root.reals("gammas");
  spec.betas = root.reals("betas");
  spec.hs = root.reals("hs");
  spec.sizes = root.integers("sizes");
  spec.params = *parse_sampler(root, false);
  spec.k = root.real("k", spec.k);
  require(spec.k > 0.0, "k must be positive", root.key_path("k"));
  return spec;
}

ReportSpec parse_report(Node& root) {
  ReportSpec spec;
  spec.inputs = root.strings("inputs");
  require(!spec.inputs.empty(), "no input files given", root.key_path("inputs"));
  return spec;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, ExperimentKind expected, const Overrides& overrides) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), "config");
  }
  // a run manifest carries the config it was run with under "config"
  if (doc.is_object() && doc.contains("config") && doc["config"].is_object()) {
    Json inner = doc["config"];
    doc = std::move(inner);
  }
  if (!doc.is_object()) throw ConfigError("expected a JSON object", "config");
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.output) doc["output"] = *overrides.output;
  if (overrides.workers) doc["workers"] = *overrides.workers;

  Node root(doc, "");
  ExperimentConfig cfg{parse_experiment_kind(root.string("experiment")), 0, {}, 1, {}, ReportSpec{}, {}};
  if (cfg.kind != expected) {
    throw ConfigError("file describes a '" + to_string(cfg.kind) + "' experiment, not '" + to_string(expected) + "'",
                      "experiment");
  }
  cfg.seed = root.unsigned_integer("seed", 0);
  cfg.output = root.string("output");
  require(!cfg.output.empty(), "output path is empty", "output");
  const std::int64_t workers = root.integer("workers", 1);
  require(workers >= 1 && workers <= 1024, "workers must be in [1, 1024]", "workers");
  cfg.workers = static_cast<unsigned>(workers);
  cfg.policy = parse_tail(root);
  switch (cfg.kind) {
    case ExperimentKind::Exact:
      cfg.spec = parse_exact(root);
      break;
    case ExperimentKind::Mc:
      cfg.spec = parse_mc_spec(root);
      break;
    case ExperimentKind::Probe:
      cfg.spec = parse_probe(root);
      break;
    case ExperimentKind::ContourScaling:
      cfg.spec = parse_contour(root);
      break;
    case ExperimentKind::PhaseScan:
      cfg.spec = parse_phase_scan(root);
      break;
    case ExperimentKind::Report:
      cfg.spec = parse_report(root);
      break;
  }
  root.finish();
  cfg.echo = doc.dump(2);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentKind expected, const Overrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'", "config");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), expected, overrides);
}

}  // namespace dyson::experiments
