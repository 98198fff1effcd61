// dyson: command-line front end for the experiment runners.
//
//   dyson <exact|mc|probe|contour-scaling|phase-scan|report> --config PATH
//         [--seed U64] [--out PATH] [--workers N]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dyson/experiments/runner.hpp"
#include "dyson/version.hpp"

namespace ex = dyson::experiments;

namespace {

std::string describe(ex::ExperimentKind kind) {
  switch (kind) {
    case ex::ExperimentKind::Exact:
      return "exact enumeration of a small volume";
    case ex::ExperimentKind::Mc:
      return "Monte Carlo chains with blocking error bars";
    case ex::ExperimentKind::Probe:
      return "annulus probe of the decimated chain";
    case ex::ExperimentKind::ContourScaling:
      return "flip cost and field gain scaling fits, Peierls sums";
    case ex::ExperimentKind::PhaseScan:
      return "coexistence flags over a decaying-field grid";
    case ex::ExperimentKind::Report:
      return "pool result files by key";
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume experiments on long-range Ising chains"};
  app.set_version_flag("--version", std::string(dyson::kVersion));
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> workers;

  for (auto kind : {ex::ExperimentKind::Exact, ex::ExperimentKind::Mc, ex::ExperimentKind::Probe,
                    ex::ExperimentKind::ContourScaling, ex::ExperimentKind::PhaseScan, ex::ExperimentKind::Report}) {
    CLI::App* sub = app.add_subcommand(ex::to_string(kind), describe(kind));
    sub->add_option("--config", config, "experiment file (JSON) or a run manifest")->required();
    sub->add_option("--seed", seed, "override the seed");
    sub->add_option("--out", out, "override the output CSV path");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 1024u));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ex::kExitConfig;
  }

  const auto kind = ex::parse_experiment_kind(app.get_subcommands().front()->get_name());
  return ex::run_experiment(kind, config, ex::Overrides{seed, out, workers}, std::cerr);
}
