#pragma once

#include <cmath>
#include <exception>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dyson/experiments/config.hpp"
#include "dyson/experiments/csv.hpp"
#include "dyson/experiments/results.hpp"

namespace dyson::experiments {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCapacity = 3;

/// 3 - log 3 / log 2.
inline const double kAlphaStar = 3.0 - std::log(3.0) / std::log(2.0);

/// Exit code for an exception escaping an experiment.
int exit_code_for(std::exception_ptr error) noexcept;

using RowSink = std::function<void(const ResultRow&)>;

/// Runs an exact, mc, probe, contour-scaling or phase-scan experiment and
/// hands its rows to `sink` in a fixed order that does not depend on the
/// worker count. Tasks run in parallel; if one fails, the rows of the tasks
/// before it are emitted and its exception is rethrown. Phase scans instead
/// record failures per point (NaN rows) and keep going; the return value is
/// the exit code such failures call for, 0 if none.
int run_rows(const ExperimentConfig& config, const RowSink& sink, std::ostream& log);

struct PhasePoint {
  double alpha = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  double h = 0.0;
  std::int64_t size = 0;
  ChainStats m_plus;
  ChainStats m_minus;
  double gap = 0.0;
  double gap_error = 0.0;
  bool flag = false;
  /// Set when the point could not be run; the estimates are NaN.
  std::string error;
  int error_code = kExitOk;
};

/// gamma > alpha - 1 and gamma > alpha* - 1.
bool predicted_coexistence(double alpha, double gamma);

/// One point per (alpha, gamma, beta, h, size), sizes innermost. Chains for
/// point p use tasks 2p (plus boundary) and 2p + 1 (minus boundary).
std::vector<PhasePoint> phase_scan(const PhaseScanSpec& spec, const TailPolicy& policy, std::uint64_t seed,
                                   unsigned workers);

/// Columns of a pooled report: the key columns, value, std_error,
/// certified_error and n_runs.
std::vector<std::string> report_header();

/// Groups rows of shared-schema tables by key (every column but value,
/// std_error, certified_error and seed) in order of first appearance.
/// Values are pooled by inverse-variance weighting; rows with zero error
/// (exact results) are averaged and take precedence; flag-like quantities
/// are combined with logical and. ConfigError for tables with another
/// header or no tables at all.
CsvTable pool_results(const std::vector<CsvTable>& tables);

/// Full command: load, run, write `<output>` and `<output>.manifest.json`.
/// Diagnostics go to `log`. Returns the process exit code.
int run_experiment(ExperimentKind kind, const std::string& config_path, const Overrides& overrides, std::ostream& log);

}  // namespace dyson::experiments
