// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "demix2d/harness.hpp"

using namespace demix2d;
using namespace demix2d::harness;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.n = 5;
  cfg.r_min = cfg.r_max = 1;
  cfg.s_min = cfg.s_max = 1;
  cfg.lambda = LambdaSpec::parse("theorem");
  cfg.delta_min = DeltaSpec::parse("none");
  cfg.trials = 2;
  cfg.seed = 7;
  cfg.recover.points_per_axis = 64;
  return cfg;
}

fs::path temp_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("demix2d_test_" + tag);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing and layering") {
  CHECK(LambdaSpec::parse("theorem").resolve(9) == doctest::Approx(1.0 / 9.0));
  CHECK(LambdaSpec::parse("0.125").resolve(9) == doctest::Approx(0.125));
  CHECK_THROWS_AS(LambdaSpec::parse("bogus"), ConfigError);

  CHECK(DeltaSpec::parse("fig2").resolve(9) == doctest::Approx(3.0 / 8.0));
  CHECK(DeltaSpec::parse("theorem").resolve(9) == doctest::Approx(3.36 / 8.0));
  CHECK(DeltaSpec::parse("none").resolve(9) == 0.0);
  CHECK(DeltaSpec::parse("0.2").resolve(9) == doctest::Approx(0.2));

  ExperimentConfig cfg = tiny_config();
  cfg.apply_json(R"({"n": 7, "trials": 3, "solver": {"rho": 2.5}, "lambda": 0.1})");
  CHECK(cfg.n == 7);
  CHECK(cfg.trials == 3);
  CHECK(cfg.solver.rho == 2.5);
  CHECK(cfg.lambda.resolve(7) == doctest::Approx(0.1));

  ExperimentConfig bad = tiny_config();
  bad.n = 4;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("run_single_trial") {
  SUBCASE("easy source-only instance succeeds") {
    auto cfg = tiny_config();
    const auto rec = run_single_trial(cfg, 1, 0, 0);
    CHECK(rec.converged);
    CHECK(rec.success);
    CHECK(rec.nmse <= 1e-3);
    CHECK(rec.est_sources.r() == 1);
    CHECK(rec.est_spikes.s() == 0);
  }

  SUBCASE("spike-only instance succeeds with an empty source set") {
    auto cfg = tiny_config();
    const auto rec = run_single_trial(cfg, 0, 1, 0);
    CHECK(rec.converged);
    CHECK(rec.success);
    CHECK(rec.est_sources.r() == 0);
    CHECK(rec.est_spikes.s() == 1);
    CHECK(rec.true_spikes.s() == 1);
    CHECK(rec.est_spikes.entries[0].first == rec.true_spikes.entries[0].first);
  }

  SUBCASE("r + s beyond n^2 is rejected before solving") {
    auto cfg = tiny_config();
    CHECK_THROWS_AS(run_single_trial(cfg, 20, 6, 0), ConfigError);
  }

  SUBCASE("records serialize to JSON lines") {
    auto cfg = tiny_config();
    const auto rec = run_single_trial(cfg, 1, 0, 0);
    const std::string line = rec.to_json();
    CHECK(line.find("\"nmse\"") != std::string::npos);
    CHECK(line.find('\n') == std::string::npos);
  }
}

TEST_CASE("phase transition determinism and artifacts") {
  auto cfg = tiny_config();
  cfg.threads = 2;

  const auto run1 = run_phase_transition(cfg);
  const auto run2 = run_phase_transition(cfg);

  SUBCASE("identical seeds give identical tables and records") {
    REQUIRE(run1.records.size() == run2.records.size());
    for (std::size_t i = 0; i < run1.records.size(); ++i)
      CHECK(run1.records[i].to_json() == run2.records[i].to_json());
    CHECK(table_to_csv(run1.table) == table_to_csv(run2.table));
    CHECK(table_to_pgm(run1.table) == table_to_pgm(run2.table));
  }

  SUBCASE("artifacts written, protected, and forceable") {
    const auto dir = temp_dir("artifacts");
    emit_artifacts(run1, cfg, dir.string());
    CHECK(fs::exists(dir / "records.jsonl"));
    CHECK(fs::exists(dir / "table.csv"));
    CHECK(fs::exists(dir / "rates.pgm"));
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK_THROWS_AS(emit_artifacts(run1, cfg, dir.string()), IoError);
    auto forced = cfg;
    forced.force = true;
    emit_artifacts(run1, forced, dir.string());

    const std::string csv = slurp(dir / "table.csv");
    CHECK(csv.rfind("r,s,success_rate\n", 0) == 0);
    fs::remove_all(dir);
  }
}

TEST_CASE("csv and graymap encode identical data") {
  PhaseTable table;
  table.r_values = {1, 2};
  table.s_values = {1, 2};
  // rates[ri * s_count + si]
  table.rates = {0.0, 0.5, 0.5, 1.0};

  const auto pgm = table_to_pgm(table);
  const std::string header = "P5\n2 2\n255\n";
  REQUIRE(pgm.size() == header.size() + 4);
  CHECK(std::string(pgm.begin(), pgm.begin() + static_cast<long>(header.size())) == header);
  // row = s ascending, column = r ascending; round half up
  CHECK(pgm[header.size() + 0] == 0);
  CHECK(pgm[header.size() + 1] == 128);
  CHECK(pgm[header.size() + 2] == 128);
  CHECK(pgm[header.size() + 3] == 255);

  // decode-and-compare round trip against the CSV
  const std::string csv = table_to_csv(table);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    int r, s;
    double rate;
    REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf", &r, &s, &rate) == 3);
    const std::size_t ri = static_cast<std::size_t>(r - 1), si = static_cast<std::size_t>(s - 1);
    const double pixel = pgm[header.size() + si * 2 + ri];
    CHECK(pixel == std::floor(rate * 255.0 + 0.5));
  }
}

TEST_CASE("emit_artifacts with an empty record list") {
  PhaseRun empty;
  auto cfg = tiny_config();
  const auto dir = temp_dir("empty");
  emit_artifacts(empty, cfg, dir.string());
  CHECK(slurp(dir / "records.jsonl").empty());
  CHECK(slurp(dir / "table.csv") == "r,s,success_rate\n");
  CHECK(fs::exists(dir / "manifest.json"));
  fs::remove_all(dir);
}
