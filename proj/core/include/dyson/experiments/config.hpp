#pragma once

// Experiment configuration files (JSON, one experiment per file).
//
// Every file names its experiment kind, a seed and an output path; the rest
// depends on the kind. Unknown keys, wrong types and values outside the
// domain of the underlying types are rejected at load time with a
// ConfigError naming the offending key (dotted path, e.g. "model.alpha").
// A run manifest is also accepted: its "config" member is loaded instead.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dyson/lattice.hpp"
#include "dyson/mc.hpp"
#include "dyson/renormalization.hpp"

namespace dyson::experiments {

enum class ExperimentKind { Exact, Mc, Probe, ContourScaling, PhaseScan, Report };

std::string to_string(ExperimentKind kind);
/// "exact", "mc", "probe", "contour-scaling", "phase-scan" or "report".
ExperimentKind parse_experiment_kind(std::string_view name);

struct ExactSpec {
  ModelSpec model;
  Volume volume;
  BoundaryCondition boundary;
};

struct McSpec {
  ModelSpec model;
  Volume volume;
  BoundaryCondition boundary;
  McParams params;
  std::vector<Observable> observables;
  std::int64_t replicas = 1;
  /// Optional time-series CSV; only with a single replica.
  std::string timeseries;
};

struct ProbeSpec {
  ModelSpec model;
  std::vector<std::int64_t> L;
  std::vector<TailPattern> beyond;
  /// Exact enumeration when empty.
  std::optional<McParams> mc;
};

struct ContourSpec {
  double J = 1.0;
  std::vector<double> alphas;
  std::vector<double> gammas;
  double h = 1.0;
  std::vector<std::int64_t> L;
  std::vector<double> peierls_betas;
  std::int64_t peierls_max_mass = 50;
};

struct PhaseScanSpec {
  double J = 1.0;
  std::vector<double> alphas;
  std::vector<double> gammas;
  std::vector<double> betas;
  std::vector<double> hs;
  std::vector<std::int64_t> sizes;
  McParams params;
  double k = 5.0;
};

struct ReportSpec {
  std::vector<std::string> inputs;
};

using ExperimentSpec = std::variant<ExactSpec, McSpec, ProbeSpec, ContourSpec, PhaseScanSpec, ReportSpec>;

/// Command-line overrides applied on top of the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<unsigned> workers;
};

struct ExperimentConfig {
  ExperimentKind kind;
  std::uint64_t seed = 0;
  std::string output;
  unsigned workers = 1;
  TailPolicy policy;
  ExperimentSpec spec;
  /// The effective configuration (overrides applied) as canonical JSON.
  std::string echo;
};

ExperimentConfig parse_config(std::string_view text, ExperimentKind expected, const Overrides& overrides = {});
/// ConfigError if the file cannot be read.
ExperimentConfig load_config(const std::string& path, ExperimentKind expected, const Overrides& overrides = {});

}  // namespace dyson::experiments
