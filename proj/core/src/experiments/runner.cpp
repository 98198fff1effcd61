#include "dyson/experiments/runner.hpp"

#include <chrono>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "dyson/contour.hpp"
#include "dyson/errors.hpp"
#include "dyson/exact.hpp"
#include "dyson/parallel.hpp"
#include "dyson/version.hpp"
#include "json_node.hpp"

namespace dyson::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string volume_label(const Volume& v) { return "[" + std::to_string(v.lo()) + "," + std::to_string(v.hi()) + "]"; }

std::string beyond_label(TailPattern t) { return t == TailPattern::AllMinus ? "minus" : "plus"; }

// Runs `fn(k)` for every task, then emits the rows in task order. The first
// failing task stops the emission and its exception propagates.
template <class Fn>
void run_tasks(std::size_t tasks, unsigned workers, Fn&& fn, const RowSink& sink) {
  std::vector<std::vector<ResultRow>> rows(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  parallel_for(tasks, workers, [&](std::size_t k) {
    try {
      rows[k] = fn(k);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  });
  for (std::size_t k = 0; k < tasks; ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    for (const auto& r : rows[k]) sink(r);
  }
}

ResultRow base_row(const ExperimentConfig& cfg, const ModelSpec& model) {
  ResultRow r;
  r.experiment = to_string(cfg.kind);
  r.J = model.coupling.strength();
  r.alpha = model.coupling.alpha();
  r.beta = model.beta;
  if (const auto* d = std::get_if<DecayingField>(&model.field.variant())) {
    r.h = d->h;
    r.gamma = d->gamma;
  } else if (const auto* hom = std::get_if<HomogeneousField>(&model.field.variant())) {
    r.h = hom->h;
  }
  r.seed = cfg.seed;
  return r;
}

void run_exact(const ExperimentConfig& cfg, const ExactSpec& spec, const RowSink& sink) {
  const ExactResult res = enumerate(spec.volume, spec.boundary, spec.model, cfg.policy, ExactOptions{false, cfg.workers});
  ResultRow row = base_row(cfg, spec.model);
  row.volume = volume_label(spec.volume);
  row.boundary = spec.boundary.describe();
  row.sampler = "exact";
  row.certified_error = res.certified_error;
  row.quantity = "log_partition";
  row.value = res.log_partition;
  sink(row);
  double total = 0.0;
  for (std::size_t a = 0; a < res.magnetization.size(); ++a) {
    row.quantity = Observable::spin(spec.volume.site(a)).id();
    row.value = res.magnetization[a];
    total += res.magnetization[a];
    sink(row);
  }
  row.quantity = "m";
  row.value = total / static_cast<double>(res.magnetization.size());
  sink(row);
}

void run_mc(const ExperimentConfig& cfg, const McSpec& spec, const RowSink& sink) {
  const McSystem system(spec.volume, spec.boundary, spec.model, cfg.policy);
  McParams params = spec.params;
  params.seed = cfg.seed;
  const int far = spec.boundary.far_sign();
  const SpinConfig start = SpinConfig::uniform(spec.volume, static_cast<Spin>(far < 0 ? -1 : 1));
  std::ofstream timeseries;
  if (!spec.timeseries.empty()) {
    timeseries.open(spec.timeseries, std::ios::binary);
    if (!timeseries) throw ConfigError("cannot write '" + spec.timeseries + "'", "timeseries");
    timeseries << "sweep,observable_id,value\n";
    timeseries.precision(17);
  }
  run_tasks(
      static_cast<std::size_t>(spec.replicas), cfg.workers,
      [&](std::size_t task) {
        const ChainOptions options{task, start, timeseries.is_open() ? &timeseries : nullptr};
        const auto stats = run_chain(system, params, spec.observables, options);
        std::vector<ResultRow> rows;
        ResultRow row = base_row(cfg, spec.model);
        row.volume = volume_label(spec.volume);
        row.boundary = spec.boundary.describe();
        row.sampler = to_string(params.algorithm);
        for (std::size_t k = 0; k < stats.size(); ++k) {
          row.quantity = spec.observables[k].id();
          row.value = stats[k].mean;
          row.std_error = stats[k].std_error;
          row.certified_error = system.system().certified_error;
          rows.push_back(row);
          row.quantity = spec.observables[k].id() + ":tau";
          row.value = stats[k].autocorr_time;
          row.std_error = 0.0;
          row.certified_error = 0.0;
          rows.push_back(row);
        }
        return rows;
      },
      sink);
}

void run_probe(const ExperimentConfig& cfg, const ProbeSpec& spec, const RowSink& sink) {
  ProbeSampler sampler = ExactSampler{1};
  if (spec.mc) {
    McParams p = *spec.mc;
    p.seed = cfg.seed;
    sampler = p;
  }
  const std::size_t nb = spec.beyond.size();
  const double alpha = spec.model.coupling.alpha();
  run_tasks(
      spec.L.size() * nb, cfg.workers,
      [&](std::size_t task) {
        const ProbeGeometry g = ProbeGeometry::for_alpha(spec.L[task / nb], alpha);
        const TailPattern beyond = spec.beyond[task % nb];
        if (!spec.mc && 2 * g.N > kMaxEnumerationSites) {
          throw CapacityError("probe: L = " + std::to_string(g.L) + " needs " + std::to_string(2 * g.N) +
                              " hidden sites, beyond the exact enumeration limit");
        }
        const ProbeEstimate plus = probe_magnetization(g, 1, beyond, spec.model, cfg.policy, sampler, 2 * task);
        const ProbeEstimate minus = probe_magnetization(g, -1, beyond, spec.model, cfg.policy, sampler, 2 * task + 1);
        ResultRow row = base_row(cfg, spec.model);
        row.L = g.L;
        row.N = g.N;
        row.beyond = beyond_label(beyond);
        row.sampler = spec.mc ? to_string(spec.mc->algorithm) : "exact";
        std::vector<ResultRow> rows;
        for (const auto& [sign, est] : {std::pair{1, plus}, std::pair{-1, minus}}) {
          row.annulus_sign = sign;
          row.quantity = "M";
          row.value = est.value;
          row.std_error = est.std_error;
          row.certified_error = est.certified_error;
          rows.push_back(row);
        }
        row.annulus_sign.reset();
        row.quantity = "gap";
        row.value = plus.value - minus.value;
        row.std_error = std::hypot(plus.std_error, minus.std_error);
        row.certified_error = plus.certified_error + minus.certified_error;
        rows.push_back(row);
        return rows;
      },
      sink);
}

void run_contour(const ExperimentConfig& cfg, const ContourSpec& spec, const RowSink& sink, std::ostream& log) {
  const std::size_t na = spec.alphas.size();
  run_tasks(
      na + spec.gammas.size(), cfg.workers,
      [&](std::size_t task) {
        std::vector<ResultRow> rows;
        ResultRow row;
        row.experiment = to_string(cfg.kind);
        row.J = spec.J;
        row.seed = cfg.seed;
        std::vector<std::pair<double, double>> samples;
        std::string name;
        if (task < na) {
          const CouplingLaw law(spec.J, spec.alphas[task]);
          row.alpha = spec.alphas[task];
          name = "flip_cost";
          for (std::int64_t L : spec.L) {
            const TailValue c = flip_cost_certified(L, law, cfg.policy);
            row.L = L;
            row.quantity = name;
            row.value = c.value;
            row.certified_error = c.error;
            rows.push_back(row);
            samples.emplace_back(static_cast<double>(L), c.value);
          }
        } else {
          const FieldLaw field = FieldLaw::decaying(spec.h, spec.gammas[task - na]);
          row.gamma = spec.gammas[task - na];
          row.h = spec.h;
          name = "field_gain";
          for (std::int64_t L : spec.L) {
            row.L = L;
            row.quantity = name;
            row.value = field_gain(L, field);
            row.certified_error = 0.0;
            rows.push_back(row);
            samples.emplace_back(static_cast<double>(L), row.value);
          }
        }
        row.L.reset();
        row.certified_error = 0.0;
        try {
          const ScalingFit fit = fit_scaling_exponent(samples);
          row.quantity = name + "_exponent";
          row.value = fit.exponent;
          row.std_error = fit.stderr_exponent;
          rows.push_back(row);
        } catch (const DomainError&) {
          // too few or too narrow L values for a fit
        }
        if (task < na) {
          const CouplingLaw law(spec.J, spec.alphas[task]);
          row.std_error = 0.0;
          for (double beta : spec.peierls_betas) {
            row.beta = beta;
            row.L = spec.peierls_max_mass;
            row.quantity = "peierls_sum";
            row.value = peierls_sum(beta, law, spec.peierls_max_mass, cfg.policy);
            rows.push_back(row);
          }
        }
        return rows;
      },
      sink);
  if (spec.L.size() < 5) log << "contour-scaling: fewer than 5 L values, exponent fits skipped\n";
}

void run_phase_scan(const ExperimentConfig& cfg, const PhaseScanSpec& spec, const RowSink& sink, int& status,
                    std::ostream& log) {
  const std::vector<PhasePoint> points = phase_scan(spec, cfg.policy, cfg.seed, cfg.workers);
  const std::size_t per_point = spec.sizes.size();
  for (std::size_t start = 0; start < points.size(); start += per_point) {
    bool all_true = true;
    bool all_same = true;
    bool failed = false;
    const PhasePoint& head = points[start];
    for (std::size_t s = start; s < start + per_point; ++s) {
      const PhasePoint& p = points[s];
      ResultRow row;
      row.experiment = to_string(cfg.kind);
      row.J = spec.J;
      row.alpha = p.alpha;
      row.gamma = p.gamma;
      row.beta = p.beta;
      row.h = p.h;
      row.volume = p.size >= 1 ? volume_label(Volume::centered(p.size)) : std::to_string(p.size);
      row.sampler = to_string(spec.params.algorithm);
      row.seed = cfg.seed;
      if (!p.error.empty()) {
        log << "phase-scan: point alpha=" << p.alpha << " gamma=" << p.gamma << " beta=" << p.beta << " h=" << p.h
            << " size=" << p.size << " failed: " << p.error << '\n';
        status = std::max(status, p.error_code);
        failed = true;
      }
      row.boundary = "plus";
      row.quantity = "m_plus";
      row.value = p.m_plus.mean;
      row.std_error = p.m_plus.std_error;
      sink(row);
      row.boundary = "minus";
      row.quantity = "m_minus";
      row.value = p.m_minus.mean;
      row.std_error = p.m_minus.std_error;
      sink(row);
      row.boundary.clear();
      row.quantity = "gap";
      row.value = p.gap;
      row.std_error = p.gap_error;
      sink(row);
      row.quantity = "flag";
      row.value = failed ? kNaN : (p.flag ? 1.0 : 0.0);
      row.std_error = 0.0;
      sink(row);
      all_true = all_true && p.flag;
      all_same = all_same && p.flag == head.flag;
    }
    ResultRow row;
    row.experiment = to_string(cfg.kind);
    row.J = spec.J;
    row.alpha = head.alpha;
    row.gamma = head.gamma;
    row.beta = head.beta;
    row.h = head.h;
    row.sampler = to_string(spec.params.algorithm);
    row.seed = cfg.seed;
    const auto emit = [&](const char* quantity, double value) {
      row.quantity = quantity;
      row.value = value;
      sink(row);
    };
    emit("flag_confirmed", failed ? kNaN : (all_true ? 1.0 : 0.0));
    emit("flag_persistent", failed ? kNaN : (all_same ? 1.0 : 0.0));
    emit("gamma_above_alpha_minus_1", head.gamma > head.alpha - 1.0 ? 1.0 : 0.0);
    emit("gamma_above_alpha_star_minus_1", head.gamma > kAlphaStar - 1.0 ? 1.0 : 0.0);
    emit("predicted_coexistence", predicted_coexistence(head.alpha, head.gamma) ? 1.0 : 0.0);
  }
}

double parse_real(const std::string& s, const std::string& column) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("not a number: '" + s + "'", column);
  return x;
}

bool is_flag(const std::string& quantity) {
  return quantity.starts_with("flag") || quantity.starts_with("predicted") || quantity.starts_with("gamma_above");
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg, double seconds, int exit_code,
                    const std::vector<std::string>& outputs) {
  Json m;
  m["config"] = Json::parse(cfg.echo);
  m["experiment"] = to_string(cfg.kind);
  m["seed"] = cfg.seed;
  m["code_version"] = kVersion;
  m["wall_time_seconds"] = seconds;
  m["tail_epsilon"] = cfg.policy.epsilon;
  m["tail_horizon"] = cfg.policy.horizon;
  m["workers"] = cfg.workers;
  m["exit_code"] = exit_code;
  m["outputs"] = outputs;
  std::ofstream out(path, std::ios::binary);
  out << m.dump(2) << '\n';
}

}  // namespace

int exit_code_for(std::exception_ptr error) noexcept {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError&) {
    return kExitConfig;
  } catch (const CapacityError&) {
    return kExitCapacity;
  } catch (...) {
    return kExitFailure;
  }
}

bool predicted_coexistence(double alpha, double gamma) {
  return gamma > alpha - 1.0 && gamma > kAlphaStar - 1.0;
}

std::vector<PhasePoint> phase_scan(const PhaseScanSpec& spec, const TailPolicy& policy, std::uint64_t seed,
                                   unsigned workers) {
  std::vector<PhasePoint> points;
  for (double alpha : spec.alphas) {
    for (double gamma : spec.gammas) {
      for (double beta : spec.betas) {
        for (double h : spec.hs) {
          for (std::int64_t size : spec.sizes) {
            PhasePoint p;
            p.alpha = alpha;
            p.gamma = gamma;
            p.beta = beta;
            p.h = h;
            p.size = size;
            points.push_back(p);
          }
        }
      }
    }
  }
  McParams params = spec.params;
  params.seed = seed;
  const Observable origin[] = {Observable::spin(0)};
  parallel_for(points.size(), workers, [&](std::size_t k) {
    PhasePoint& p = points[k];
    try {
      if (!(p.alpha > 1.0 && p.alpha <= 2.0)) throw ConfigError("alpha must lie in (1, 2]", "alphas");
      if (!(p.gamma > 0.0)) throw ConfigError("gamma must be positive", "gammas");
      if (!(p.h > 0.0)) throw ConfigError("h must be positive", "hs");
      if (!(p.beta >= 0.0)) throw ConfigError("beta must be non-negative", "betas");
      if (p.size < 1) throw ConfigError("sizes must be positive", "sizes");
      const ModelSpec model(CouplingLaw(spec.J, p.alpha), FieldLaw::decaying(p.h, p.gamma), p.beta);
      const Volume vol = Volume::centered(p.size);
      p.m_plus = run_chain(vol, BoundaryCondition::plus(), model, policy, params, origin, ChainOptions{2 * k, {}, nullptr})[0];
      p.m_minus =
          run_chain(vol, BoundaryCondition::minus(), model, policy, params, origin, ChainOptions{2 * k + 1, {}, nullptr})[0];
      p.gap = p.m_plus.mean - p.m_minus.mean;
      p.gap_error = std::hypot(p.m_plus.std_error, p.m_minus.std_error);
      p.flag = p.gap > spec.k * p.gap_error;
    } catch (...) {
      const std::exception_ptr e = std::current_exception();
      p.error_code = exit_code_for(e);
      try {
        std::rethrow_exception(e);
      } catch (const std::exception& ex) {
        p.error = ex.what();
      } catch (...) {
        p.error = "unknown error";
      }
      p.m_plus = p.m_minus = ChainStats{kNaN, kNaN, kNaN, 0};
      p.gap = p.gap_error = kNaN;
      p.flag = false;
    }
  });
  return points;
}

int run_rows(const ExperimentConfig& cfg, const RowSink& sink, std::ostream& log) {
  int status = kExitOk;
  std::visit(
      [&](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, ExactSpec>) {
          run_exact(cfg, spec, sink);
        } else if constexpr (std::is_same_v<T, McSpec>) {
          run_mc(cfg, spec, sink);
        } else if constexpr (std::is_same_v<T, ProbeSpec>) {
          run_probe(cfg, spec, sink);
        } else if constexpr (std::is_same_v<T, ContourSpec>) {
          run_contour(cfg, spec, sink, log);
        } else if constexpr (std::is_same_v<T, PhaseScanSpec>) {
          run_phase_scan(cfg, spec, sink, status, log);
        } else {
          throw UnsupportedError("run_rows: reports are produced by pool_results");
        }
      },
      cfg.spec);
  return status;
}

std::vector<std::string> report_header() {
  std::vector<std::string> h;
  for (auto c : kResultColumns) {
    if (c != "seed") h.emplace_back(c);
  }
  h.emplace_back("n_runs");
  return h;
}

CsvTable pool_results(const std::vector<CsvTable>& tables) {
  if (tables.empty()) throw ConfigError("no result tables to report on", "inputs");
  const std::vector<std::string> expected = result_header();
  std::vector<std::size_t> key_cols;
  for (std::size_t c = 0; c < expected.size(); ++c) {
    bool value_col = false;
    for (auto v : kValueColumns) value_col = value_col || expected[c] == v;
    if (!value_col) key_cols.push_back(c);
  }
  const std::size_t value_col = expected.size() - 4;
  const std::size_t quantity_col = value_col - 1;

  struct Group {
    std::vector<std::string> key;
    std::vector<double> values;
    std::vector<double> errors;
    double certified = 0.0;
  };
  std::vector<Group> groups;
  std::map<std::vector<std::string>, std::size_t> index;
  for (std::size_t t = 0; t < tables.size(); ++t) {
    if (tables[t].header != expected) {
      throw ConfigError("input " + std::to_string(t) + " does not have the shared result columns", "inputs");
    }
    for (const auto& row : tables[t].rows) {
      std::vector<std::string> key;
      for (std::size_t c : key_cols) key.push_back(row[c]);
      auto [it, fresh] = index.emplace(key, groups.size());
      if (fresh) groups.push_back({std::move(key), {}, {}, 0.0});
      Group& g = groups[it->second];
      g.values.push_back(parse_real(row[value_col], "value"));
      g.errors.push_back(parse_real(row[value_col + 1], "std_error"));
      g.certified = std::max(g.certified, parse_real(row[value_col + 2], "certified_error"));
    }
  }

  CsvTable out{report_header(), {}};
  for (const Group& g : groups) {
    double value = kNaN;
    double error = kNaN;
    const bool flag = is_flag(g.key[quantity_col]);
    std::size_t used = 0;
    double exact_sum = 0.0;
    std::size_t exact_n = 0;
    double weight = 0.0;
    double weighted = 0.0;
    double flag_value = 1.0;
    for (std::size_t k = 0; k < g.values.size(); ++k) {
      const double v = g.values[k];
      const double e = g.errors[k];
      if (std::isnan(v)) continue;
      ++used;
      flag_value = std::min(flag_value, v);
      if (!(e > 0.0)) {
        exact_sum += v;
        ++exact_n;
      } else {
        weight += 1.0 / (e * e);
        weighted += v / (e * e);
      }
    }
    if (used > 0 && flag) {
      value = flag_value;
      error = 0.0;
    } else if (exact_n > 0) {
      value = exact_sum / static_cast<double>(exact_n);
      error = 0.0;
    } else if (used > 0) {
      value = weighted / weight;
      error = 1.0 / std::sqrt(weight);
    }
    std::vector<std::string> fields = g.key;
    fields.push_back(format_real(value));
    fields.push_back(format_real(error));
    fields.push_back(format_real(g.certified));
    fields.push_back(std::to_string(used));
    out.rows.push_back(std::move(fields));
  }
  return out;
}

int run_experiment(ExperimentKind kind, const std::string& config_path, const Overrides& overrides, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<ExperimentConfig> cfg;
  try {
    cfg = load_config(config_path, kind, overrides);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const std::string manifest_path = cfg->output + ".manifest.json";
  std::vector<std::string> outputs = {cfg->output};
  if (const auto* mc = std::get_if<McSpec>(&cfg->spec); mc && !mc->timeseries.empty()) outputs.push_back(mc->timeseries);

  std::ofstream out(cfg->output, std::ios::binary);
  if (!out) {
    log << "config error: output: cannot write '" << cfg->output << "'\n";
    return kExitConfig;
  }

  int status = kExitOk;
  try {
    if (const auto* report = std::get_if<ReportSpec>(&cfg->spec)) {
      std::vector<CsvTable> tables;
      for (std::size_t k = 0; k < report->inputs.size(); ++k) {
        std::ifstream in(report->inputs[k], std::ios::binary);
        if (!in) throw ConfigError("cannot read '" + report->inputs[k] + "'", "inputs[" + std::to_string(k) + "]");
        std::ostringstream text;
        text << in.rdbuf();
        tables.push_back(parse_csv(text.str()));
      }
      const CsvTable pooled = pool_results(tables);
      CsvWriter writer(out, pooled.header);
      for (const auto& row : pooled.rows) writer.write_row(row);
      writer.flush();
      // summary: quantity, the non-empty key fields, pooled value
      for (const auto& row : pooled.rows) {
        std::string key;
        for (std::size_t c = 1; c + 5 < pooled.header.size(); ++c) {
          if (!row[c].empty()) key += pooled.header[c] + "=" + row[c] + " ";
        }
        log << row[pooled.header.size() - 5] << "  " << key << " -> " << row[pooled.header.size() - 4] << " +- "
            << row[pooled.header.size() - 3] << "  (n=" << row.back() << ")\n";
      }
    } else {
      CsvWriter writer(out, result_header());
      status = run_rows(*cfg, [&](const ResultRow& r) { writer.write_row(r.fields()); }, log);
      writer.flush();
    }
  } catch (const std::exception& e) {
    out.flush();
    status = exit_code_for(std::current_exception());
    log << (status == kExitCapacity ? "capacity error: " : status == kExitConfig ? "config error: " : "error: ")
        << e.what() << '\n';
  }
  out.close();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(manifest_path, *cfg, seconds, status, outputs);
  return status;
}

}  // namespace dyson::experiments
