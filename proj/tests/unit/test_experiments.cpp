#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "dyson/errors.hpp"
#include "dyson/experiments/runner.hpp"

namespace fs = std::filesystem;
using namespace dyson;
using namespace dyson::experiments;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dyson_test_experiments";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

const char* kExact = R"({
  "experiment": "exact", "seed": 0, "output": "exact.csv",
  "model": {"J": 1.0, "alpha": 1.5, "beta": 1.0, "field": {"kind": "decaying", "h": 0.1, "gamma": 2.0}},
  "volume": {"lo": -3, "hi": 3},
  "boundary": "plus"
})";

const char* kMc = R"({
  "experiment": "mc", "seed": 99, "output": "mc.csv",
  "model": {"J": 1.0, "alpha": 1.5, "beta": 0.5},
  "volume": {"size": 16},
  "boundary": "plus",
  "sampler": {"algorithm": "hybrid", "sweeps": 2000, "burn_in": 200},
  "observables": ["s[0]", "m"],
  "replicas": 3
})";

std::string collect(const ExperimentConfig& cfg) {
  std::ostringstream out;
  CsvWriter w(out, result_header());
  std::ostringstream log;
  run_rows(cfg, [&](const ResultRow& r) { w.write_row(r.fields()); }, log);
  w.flush();
  return out.str();
}

}  // namespace

TEST(Csv, FormatRealKeepsSeventeenDigits) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(format_real(-2.0 / 3.0), "-0.66666666666666663");
  EXPECT_EQ(format_real(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_real(-std::numeric_limits<double>::infinity()), "-inf");
  for (double x : {0.1, 1.0 / 3.0, M_PI, 6.02214076e23, 2.2250738585072014e-308}) EXPECT_EQ(std::stod(format_real(x)), x);
}

TEST(Csv, QuotingRoundTrips) {
  EXPECT_EQ(quote_field("plain"), "plain");
  EXPECT_EQ(quote_field("[-1,1]"), "\"[-1,1]\"");
  EXPECT_EQ(quote_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(quote_field("two\nlines"), "\"two\nlines\"");

  const std::vector<std::vector<std::string>> rows = {
      {"a,b", "\"q\"", ""}, {"line\nbreak", "x", "y"}, {"", "", ""}};
  std::ostringstream out;
  CsvWriter w(out, {"c1", "c2", "c3"});
  for (const auto& r : rows) w.write_row(r);
  w.flush();
  const CsvTable t = parse_csv(out.str());
  EXPECT_EQ(t.header, (std::vector<std::string>{"c1", "c2", "c3"}));
  EXPECT_EQ(t.rows, rows);
}

TEST(Csv, RejectsMalformedInput) {
  EXPECT_THROW(parse_csv(""), ConfigError);
  EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), ConfigError);
  EXPECT_THROW(parse_csv("a,b\n\"open,2\n"), ConfigError);
  std::ostringstream out;
  CsvWriter w(out, {"a", "b"});
  EXPECT_THROW(w.write_row({"1"}), InvariantError);
}

TEST(Config, ErrorsNameTheKey) {
  auto key_of = [](const std::string& text) {
    try {
      parse_config(text, ExperimentKind::Exact);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<no error>");
  };
  std::string text = kExact;
  EXPECT_EQ(key_of(std::string(text).replace(text.find("\"alpha\": 1.5"), 12, "\"alpha\": \"x\"")), "model.alpha");
  EXPECT_EQ(key_of(std::string(text).replace(text.find("\"plus\""), 6, "\"sideways\"")), "boundary");
  EXPECT_EQ(key_of(std::string(text).replace(text.find("\"seed\": 0,"), 10, "\"seed\": 0, \"bogus\": 1,")), "bogus");
  EXPECT_EQ(key_of(std::string(text).replace(text.find("\"J\": 1.0,"), 9, "\"J\": 1.0, \"jj\": 2,")), "model.jj");
  EXPECT_EQ(key_of("{\"experiment\": \"exact\""), "config");
  EXPECT_EQ(key_of("[1, 2]"), "config");
  EXPECT_THROW(parse_config(text, ExperimentKind::Mc), ConfigError);
}

TEST(Config, OverridesReplaceFileValuesAndEcho) {
  const ExperimentConfig cfg = parse_config(kExact, ExperimentKind::Exact, Overrides{77, "elsewhere.csv", 4});
  EXPECT_EQ(cfg.seed, 77u);
  EXPECT_EQ(cfg.output, "elsewhere.csv");
  EXPECT_EQ(cfg.workers, 4u);
  EXPECT_NE(cfg.echo.find("elsewhere.csv"), std::string::npos);
  const ExperimentConfig again = parse_config(cfg.echo, ExperimentKind::Exact);
  EXPECT_EQ(again.seed, 77u);
  EXPECT_EQ(again.echo, cfg.echo);
}

TEST(Config, LogSpacedSizes) {
  const ExperimentConfig cfg = parse_config(R"({
    "experiment": "contour-scaling", "seed": 0, "output": "c.csv",
    "alphas": [1.5], "gammas": [0.5], "L": {"from": 100, "to": 10000, "points": 21}
  })",
                                            ExperimentKind::ContourScaling);
  const auto& L = std::get<ContourSpec>(cfg.spec).L;
  ASSERT_EQ(L.size(), 21u);
  EXPECT_EQ(L.front(), 100);
  EXPECT_EQ(L.back(), 10000);
  EXPECT_EQ(L[10], 1000);
}

TEST(Runner, ExitCodes) {
  std::ostringstream log;
  EXPECT_EQ(run_experiment(ExperimentKind::Exact, scratch("missing.json").string(), {}, log), kExitConfig);
  const fs::path bad = write_file("bad.json", "{\"experiment\": \"exact\", ");
  EXPECT_EQ(run_experiment(ExperimentKind::Exact, bad.string(), {}, log), kExitConfig);

  std::string big = kExact;
  big.replace(big.find("\"lo\": -3, \"hi\": 3"), 17, "\"lo\": -15, \"hi\": 14");
  const fs::path cfg = write_file("big.json", big);
  EXPECT_EQ(run_experiment(ExperimentKind::Exact, cfg.string(), Overrides{std::nullopt, scratch("big.csv").string(), {}},
                           log),
            kExitCapacity);

  EXPECT_EQ(exit_code_for(std::make_exception_ptr(ConfigError("x"))), kExitConfig);
  EXPECT_EQ(exit_code_for(std::make_exception_ptr(CapacityError("x"))), kExitCapacity);
  EXPECT_EQ(exit_code_for(std::make_exception_ptr(std::runtime_error("x"))), kExitFailure);
}

TEST(Runner, ExactRowsMatchEnumeration) {
  const ExperimentConfig cfg = parse_config(kExact, ExperimentKind::Exact);
  const CsvTable t = parse_csv(collect(cfg));
  const auto& spec = std::get<ExactSpec>(cfg.spec);
  const ExactResult r = enumerate(spec.volume, spec.boundary, spec.model, cfg.policy);
  ASSERT_EQ(t.header, result_header());
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(t.header.begin(), t.header.end(), name) - t.header.begin());
  };
  bool saw_partition = false;
  for (const auto& row : t.rows) {
    if (row[col("quantity")] == "log_partition") {
      EXPECT_EQ(std::stod(row[col("value")]), r.log_partition);
      saw_partition = true;
    }
    if (row[col("quantity")] == "s[2]") EXPECT_EQ(std::stod(row[col("value")]), r.expectation(2));
  }
  EXPECT_TRUE(saw_partition);
}

TEST(Runner, OutputDoesNotDependOnWorkers) {
  for (const char* text : {kExact, kMc}) {
    const ExperimentKind kind = std::string(text).find("\"mc\"") != std::string::npos ? ExperimentKind::Mc
                                                                                         : ExperimentKind::Exact;
    const std::string one = collect(parse_config(text, kind, Overrides{std::nullopt, std::nullopt, 1}));
    const std::string many = collect(parse_config(text, kind, Overrides{std::nullopt, std::nullopt, 6}));
    EXPECT_EQ(one, many);
  }
}

TEST(Runner, ManifestRerunIsBitIdentical) {
  const fs::path cfg = write_file("mc.json", kMc);
  const fs::path first = scratch("first.csv");
  const fs::path second = scratch("second.csv");
  std::ostringstream log;
  ASSERT_EQ(run_experiment(ExperimentKind::Mc, cfg.string(), Overrides{std::nullopt, first.string(), 2}, log), 0);
  const fs::path manifest = first.string() + ".manifest.json";
  ASSERT_TRUE(fs::exists(manifest));
  const std::string m = slurp(manifest);
  for (const char* key : {"\"config\"", "\"seed\"", "\"code_version\"", "\"wall_time_seconds\"", "\"tail_epsilon\""}) {
    EXPECT_NE(m.find(key), std::string::npos) << key;
  }
  ASSERT_EQ(run_experiment(ExperimentKind::Mc, manifest.string(), Overrides{std::nullopt, second.string(), 5}, log),
            0);
  EXPECT_EQ(slurp(first), slurp(second));
  EXPECT_FALSE(slurp(first).empty());
}

TEST(Runner, SeedChangesMcOutput) {
  const std::string a = collect(parse_config(kMc, ExperimentKind::Mc, Overrides{1, std::nullopt, std::nullopt}));
  const std::string b = collect(parse_config(kMc, ExperimentKind::Mc, Overrides{2, std::nullopt, std::nullopt}));
  EXPECT_NE(a, b);
}

TEST(Report, InverseVarianceAndFlags) {
  auto table = [](double v1, double e1, const std::string& q) {
    ResultRow r;
    r.experiment = "mc";
    r.beta = 1.0;
    r.quantity = q;
    r.value = v1;
    r.std_error = e1;
    return CsvTable{result_header(), {r.fields()}};
  };
  const CsvTable pooled = pool_results({table(1.0, 0.1, "m"), table(2.0, 0.2, "m"), table(1.0, 0.0, "flag"),
                                        table(0.0, 0.0, "flag"), table(5.0, 0.0, "s[0]"),
                                        table(7.0, 0.0, "s[0]"), table(100.0, 1.0, "s[0]")});
  ASSERT_EQ(pooled.header, report_header());
  ASSERT_EQ(pooled.rows.size(), 3u);
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(pooled.header.begin(), pooled.header.end(), name) -
                                    pooled.header.begin());
  };
  const auto& m = pooled.rows[0];
  EXPECT_EQ(m[col("quantity")], "m");
  EXPECT_NEAR(std::stod(m[col("value")]), (1.0 * 100 + 2.0 * 25) / 125.0, 1e-15);
  EXPECT_NEAR(std::stod(m[col("std_error")]), 1.0 / std::sqrt(125.0), 1e-15);
  EXPECT_EQ(m[col("n_runs")], "2");
  EXPECT_EQ(std::stod(pooled.rows[1][col("value")]), 0.0);
  EXPECT_EQ(std::stod(pooled.rows[2][col("value")]), 6.0);
  EXPECT_EQ(pooled.rows[2][col("n_runs")], "3");
}

TEST(Report, RejectsForeignSchemas) {
  EXPECT_THROW(pool_results({}), ConfigError);
  EXPECT_THROW(pool_results({CsvTable{{"a", "b"}, {{"1", "2"}}}}), ConfigError);
}

TEST(PhaseScan, InfiniteTemperatureHasNoCoexistence) {
  PhaseScanSpec spec;
  spec.alphas = {1.5};
  spec.gammas = {2.0};
  spec.betas = {0.0};
  spec.hs = {0.1};
  spec.sizes = {32, 64};
  spec.params.sweeps = 1500;
  spec.params.burn_in = 100;
  const auto points = phase_scan(spec, TailPolicy{}, 5, 2);
  ASSERT_EQ(points.size(), 2u);
  for (const auto& p : points) {
    EXPECT_TRUE(p.error.empty()) << p.error;
    EXPECT_FALSE(p.flag);
    EXPECT_LT(std::abs(p.gap), 5.0 * p.gap_error + 1e-12);
    EXPECT_LE(std::abs(p.m_plus.mean), 3.0 * p.m_plus.std_error);
    EXPECT_LE(std::abs(p.m_minus.mean), 3.0 * p.m_minus.std_error);
  }
}

TEST(PhaseScan, PredictedRegion) {
  EXPECT_NEAR(kAlphaStar, 1.4150374992788438, 1e-15);
  EXPECT_TRUE(predicted_coexistence(1.5, 2.0));
  EXPECT_FALSE(predicted_coexistence(1.5, 0.2));
  EXPECT_FALSE(predicted_coexistence(1.5, 0.45));
  EXPECT_TRUE(predicted_coexistence(1.2, 0.45));
  EXPECT_FALSE(predicted_coexistence(1.2, 0.4));
}

namespace {

// Small configs per experiment kind; their outputs are pinned in golden files.
struct GoldenCase {
  const char* name;
  ExperimentKind kind;
  const char* config;
};

const GoldenCase kGolden[] = {
    {"exact", ExperimentKind::Exact, kExact},
    {"mc", ExperimentKind::Mc, kMc},
    {"probe", ExperimentKind::Probe, R"({
      "experiment": "probe", "seed": 3, "output": "p.csv",
      "model": {"J": 1.0, "alpha": 1.5, "beta": 2.0},
      "L": [1, 2], "sampler": "exact"
    })"},
    {"contour", ExperimentKind::ContourScaling, R"({
      "experiment": "contour-scaling", "seed": 0, "output": "c.csv",
      "alphas": [1.5], "gammas": [0.5], "h": 0.1, "L": [10, 30, 100, 300, 1000],
      "peierls": {"betas": [1.0, 4.0], "max_mass": 20}
    })"},
    {"phase_scan", ExperimentKind::PhaseScan, R"({
      "experiment": "phase-scan", "seed": 11, "output": "s.csv",
      "alphas": [1.5], "gammas": [2.0], "betas": [1.0], "hs": [0.1], "sizes": [16, 32],
      "sampler": {"algorithm": "hybrid", "sweeps": 400, "burn_in": 100}
    })"},
};

bool is_number_column(const std::string& name) {
  return name == "value" || name == "std_error" || name == "certified_error";
}

}  // namespace

TEST(Golden, OutputMatchesPinnedFiles) {
  const fs::path dir(DYSON_GOLDEN_DIR);
  const bool update = std::getenv("DYSON_UPDATE_GOLDEN") != nullptr;
  for (const auto& c : kGolden) {
    SCOPED_TRACE(c.name);
    const std::string text = collect(parse_config(c.config, c.kind));
    const fs::path file = dir / (std::string(c.name) + ".csv");
    if (update) {
      std::ofstream(file, std::ios::binary) << text;
      continue;
    }
    ASSERT_TRUE(fs::exists(file)) << file;
    const CsvTable got = parse_csv(text);
    const CsvTable want = parse_csv(slurp(file));
    ASSERT_EQ(got.header, result_header());
    ASSERT_EQ(want.header, got.header);
    ASSERT_EQ(want.rows.size(), got.rows.size());
    for (std::size_t r = 0; r < got.rows.size(); ++r) {
      for (std::size_t k = 0; k < got.header.size(); ++k) {
        if (!is_number_column(got.header[k])) {
          EXPECT_EQ(got.rows[r][k], want.rows[r][k]) << "row " << r << " column " << got.header[k];
          continue;
        }
        const double a = std::stod(got.rows[r][k]);
        const double b = std::stod(want.rows[r][k]);
        EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(b))) << "row " << r << " column " << got.header[k];
      }
    }
  }
}

TEST(Report, PhaseScanPoolsOneFlagRowPerGridPoint) {
  const GoldenCase& scan = kGolden[4];
  std::vector<CsvTable> tables;
  for (std::uint64_t seed : {1, 2}) {
    tables.push_back(parse_csv(collect(parse_config(scan.config, scan.kind, Overrides{seed, std::nullopt, {}}))));
  }
  const CsvTable pooled = pool_results(tables);
  const auto q = static_cast<std::size_t>(
      std::find(pooled.header.begin(), pooled.header.end(), "quantity") - pooled.header.begin());
  std::size_t persistent = 0;
  for (const auto& row : pooled.rows) {
    if (row[q] == "flag_persistent") {
      ++persistent;
      EXPECT_EQ(row.back(), "2");
    }
  }
  EXPECT_EQ(persistent, 1u);
}
