// Copyright 2026 The synth-audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "synth_audit/bench.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "stub_endpoint.hpp"
#include "testutil.hpp"

using namespace synth_audit;
namespace fs = std::filesystem;

namespace {

// Writes `count` toy datasets to CSV files and returns a config using them.
BenchConfig toy_config(const fs::path& dir, size_t count, std::vector<size_t> sizes,
                       std::vector<uint64_t> seeds) {
  BenchConfig cfg;
  for (size_t i = 0; i < count; ++i) {
    const Table t = testutil::toy_dataset(i, 160, 100 + i);
    const std::string path = (dir / ("toy" + std::to_string(i) + ".csv")).string();
    write_csv(t, path);
    DatasetSpec spec;
    spec.id = "toy" + std::to_string(i);
    spec.path = path;
    cfg.datasets.push_back(spec);
  }
  cfg.sizes = std::move(sizes);
  cfg.seeds = std::move(seeds);
  GeneratorSpec smote;
  smote.id = "smote";
  smote.type = GeneratorSpec::Type::Smote;
  cfg.generators.push_back(smote);
  return cfg;
}

const AuditCell& first_cell(const std::vector<AuditCell>& cells) {
  REQUIRE(!cells.empty());
  return cells.front();
}

}  // namespace

TEST_CASE("run_cell: SMOTE on a toy cell produces a complete report") {
  const Table real = testutil::toy_dataset(0, 160, 3);
  const std::vector<size_t> sizes{32};
  const std::vector<uint64_t> seeds{0};
  const auto cells = make_cells(real, "toy0", sizes, seeds);
  const AuditCell& cell = first_cell(cells);

  BenchConfig cfg;
  GeneratorSpec gen;
  gen.id = "smote";
  gen.type = GeneratorSpec::Type::Smote;

  const AuditReport rep = run_cell(real, cell, gen, cfg);
  CHECK(rep.status == "ok");
  CHECK(rep.synth_rows == 32);
  CHECK(rep.attack_reports.size() == 8);
  REQUIRE(rep.leakage.has_value());
  CHECK(rep.leakage->worst_case_auc >= 0.0);
  REQUIRE(rep.column_shapes.has_value());
  REQUIRE(rep.pair_trends.has_value());
  REQUIRE(rep.beta_recall.has_value());
  REQUIRE(rep.utility.has_value());
  REQUIRE(rep.prop_closer.has_value());
  REQUIRE(rep.rare.has_value());
  CHECK(!rep.histograms.empty());

  // Worst case dominates every per-attack AUC.
  for (const AttackReport& a : rep.attack_reports) {
    CHECK(rep.leakage->worst_case_auc >= a.auc);
  }

  const std::string json = report_to_json(rep);
  const auto parsed = nlohmann::json::parse(json);
  CHECK(parsed["schema_version"] == AuditReport::kSchemaVersion);
  CHECK(parsed["leakage"]["attacks"].size() == 8);
}

TEST_CASE("run_cell: reference-less cell runs only the black-box attacks") {
  const Table real = testutil::toy_dataset(1, 40, 7);
  // n equal to the full train partition leaves no reference rows.
  const auto split = stratified_split(real, kDefaultTestFrac, 0);
  const std::vector<size_t> sizes{split.train_idx.size()};
  const std::vector<uint64_t> seeds{0};
  const auto cells = make_cells(real, "toy1", sizes, seeds);
  const AuditCell& cell = first_cell(cells);
  REQUIRE(cell.reference_idx.empty());

  BenchConfig cfg;
  GeneratorSpec gen;
  gen.id = "marginal";
  gen.type = GeneratorSpec::Type::Marginal;
  const AuditReport rep = run_cell(real, cell, gen, cfg);
  CHECK(rep.attack_reports.size() == 3);
  CHECK(rep.skipped_attacks.size() == 5);
  for (const auto& [name, reason] : rep.skipped_attacks) {
    CHECK(reason == "reference unavailable");
  }
}

TEST_CASE("run_cell: pre-generated file skips generation; failures degrade gracefully") {
  const auto dir = testutil::make_temp_dir("files_gen");
  const Table real = testutil::toy_dataset(2, 120, 5);
  const std::vector<size_t> sizes{24};
  const std::vector<uint64_t> seeds{1};
  const auto cells = make_cells(real, "toy2", sizes, seeds);
  const AuditCell& cell = first_cell(cells);

  const Table pre = marginal_generate(real.select_rows(cell.train_idx), 24, 9);
  write_csv(pre, (dir / "toy2_n24_s1.csv").string());

  BenchConfig cfg;
  GeneratorSpec gen;
  gen.id = "external";
  gen.type = GeneratorSpec::Type::Files;
  gen.files_template = (dir / "{dataset}_n{n}_s{seed}.csv").string();
  const AuditReport rep = run_cell(real, cell, gen, cfg);
  CHECK(rep.status == "ok");
  CHECK(rep.synth_rows == 24);
  CHECK(rep.timings_ms.count("generate") == 1);

  // Missing file: generator failure marks the cell but never throws.
  GeneratorSpec missing = gen;
  missing.files_template = (dir / "absent_{dataset}_{n}_{seed}.csv").string();
  const AuditReport failed = run_cell(real, cell, missing, cfg);
  CHECK(failed.status == "generator_failed");
  CHECK(failed.leakage_skip == "generator failed");
  CHECK(!failed.error.empty());
  fs::remove_all(dir);
}

TEST_CASE("run_benchmark: full matrix, emitted outputs, aggregate recompute") {
  const auto dir = testutil::make_temp_dir("bench");
  BenchConfig cfg = toy_config(dir, 2, {12, 16, 20}, {0, 1, 2});
  cfg.out_dir = (dir / "out").string();

  const BenchResult result = run_benchmark(cfg);
  CHECK(result.reports.size() == 18);  // 2 datasets x 3 sizes x 3 seeds x 1 generator
  CHECK(result.failed_cells == 0);

  emit_outputs(result.reports, cfg.out_dir);
  const fs::path out(cfg.out_dir);
  CHECK(fs::exists(out / "cells"));
  CHECK(fs::exists(out / "leakage_by_generator.csv"));
  CHECK(fs::exists(out / "leakage_by_size.csv"));
  CHECK(fs::exists(out / "tradeoff.csv"));
  CHECK(fs::exists(out / "manifest.json"));

  size_t cell_files = 0;
  for (const auto& entry : fs::directory_iterator(out / "cells")) {
    if (entry.path().extension() == ".json") ++cell_files;
  }
  CHECK(cell_files == 18);

  // Re-aggregation from the emitted JSONs is byte-identical.
  const std::string by_gen = testutil::read_file(out / "leakage_by_generator.csv");
  const std::string by_size = testutil::read_file(out / "leakage_by_size.csv");
  const std::string tradeoff = testutil::read_file(out / "tradeoff.csv");
  aggregate_outputs(cfg.out_dir);
  CHECK(testutil::read_file(out / "leakage_by_generator.csv") == by_gen);
  CHECK(testutil::read_file(out / "leakage_by_size.csv") == by_size);
  CHECK(testutil::read_file(out / "tradeoff.csv") == tradeoff);

  // Hand-grouped per-size means from the cell JSONs match the CSV.
  std::map<size_t, std::vector<double>> by_n;
  for (const auto& entry : fs::directory_iterator(out / "cells")) {
    const auto j = nlohmann::json::parse(testutil::read_file(entry.path()));
    if (j["status"] != "ok") continue;
    by_n[j["n"].get<size_t>()].push_back(j["leakage"]["worst_case"]["auc"].get<double>());
  }
  std::map<size_t, double> csv_means;
  {
    std::istringstream in(by_size);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string gen, n_text, cells_text, mean_text;
      std::getline(row, gen, ',');
      std::getline(row, n_text, ',');
      std::getline(row, cells_text, ',');
      std::getline(row, mean_text, ',');
      csv_means[static_cast<size_t>(std::stoul(n_text))] = std::stod(mean_text);
    }
  }
  for (const auto& [n, values] : by_n) {
    double sum = 0.0;
    for (const double v : values) sum += v;
    CHECK(csv_means.at(n) == doctest::Approx(sum / values.size()).epsilon(1e-12));
  }

  // tradeoff.csv carries one row per generator x metric.
  size_t tradeoff_rows = 0;
  for (const char c : tradeoff) tradeoff_rows += c == '\n';
  CHECK(tradeoff_rows == 1 + 4);  // header + 4 metrics for 1 generator

  // Histogram CSVs: 20 equal-width bins per numeric column, and the pooled
  // train counts sum to rows-per-cell x cells.
  const fs::path hist_file = out / "histogram_toy0__x0.csv";
  REQUIRE(fs::exists(hist_file));
  {
    std::istringstream in(testutil::read_file(hist_file));
    std::string line;
    std::getline(in, line);  // header
    size_t bins = 0;
    double train_total = 0.0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ++bins;
      std::istringstream row(line);
      std::string field;
      for (int f = 0; f < 4; ++f) std::getline(row, field, ',');
      train_total += std::stod(field);
    }
    CHECK(bins == 20);
    CHECK(train_total == doctest::Approx((12 + 16 + 20) * 3));  // sizes x seeds
  }

  fs::remove_all(dir);
}

TEST_CASE("run_factorial: SMOTE stand-in emits the table-shaped factorial CSV") {
  const auto dir = testutil::make_temp_dir("factorial");
  BenchConfig cfg = toy_config(dir, 1, {16}, {0});
  cfg.out_dir = (dir / "out").string();

  const auto arms = default_factorial_arms();
  REQUIRE(arms.size() == 5);
  const BenchResult result = run_factorial(cfg, cfg.generators[0], arms);
  CHECK(result.reports.size() == 5);  // 1 dataset x 1 size x 1 seed x 5 arms
  for (const AuditReport& rep : result.reports) {
    CHECK(!rep.arm.empty());
  }

  emit_outputs(result.reports, cfg.out_dir);
  const std::string factorial = testutil::read_file(fs::path(cfg.out_dir) / "factorial.csv");
  std::istringstream in(factorial);
  std::string header;
  std::getline(in, header);
  CHECK(header == "arm,max_attack_auc,avg_shape,corr_similarity,prop_closer,rare_class_auc");
  size_t rows = 0;
  std::string line;
  std::set<std::string> arm_names;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    arm_names.insert(line.substr(0, line.find(',')));
  }
  CHECK(rows == 5);
  CHECK(arm_names ==
        std::set<std::string>{"default", "batch_size_10", "no_summary_stats", "temperature_0.1",
                              "temperature_0.5"});
  fs::remove_all(dir);
}

TEST_CASE("parse_bench_config: validation and defaults") {
  const std::string good = R"({
    "datasets": [{"id": "d", "path": "/tmp/x.csv"}],
    "generators": [{"id": "smote", "type": "smote", "k": 3}],
    "sizes": [8, 16],
    "seeds": [0],
    "attacks": ["dcr", "domias"],
    "jobs": 2
  })";
  const BenchConfig cfg = parse_bench_config(good);
  CHECK(cfg.datasets.size() == 1);
  CHECK(cfg.generators[0].smote.k == 3);
  CHECK(cfg.sizes == std::vector<size_t>{8, 16});
  CHECK(cfg.attacks.size() == 2);
  CHECK(cfg.jobs == 2);

  CHECK_THROWS_AS(parse_bench_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_bench_config(R"({"datasets": []})"), ConfigError);
  CHECK_THROWS_AS(parse_bench_config(R"({
    "datasets": [{"path": "x.csv"}],
    "generators": [{"id": "g", "type": "warp-drive"}]
  })"),
                  ConfigError);
  CHECK_THROWS_AS(parse_bench_config(R"({
    "datasets": [{"path": "x.csv"}],
    "generators": [{"id": "g", "type": "smote"}],
    "attacks": ["nonsense"]
  })"),
                  ConfigError);
}

TEST_CASE("run_cell: ICL generator through the bench pipeline (stub endpoint)") {
  setenv("SYNTH_AUDIT_API_KEY", "test-token", 1);
  const Table real = testutil::toy_dataset(0, 120, 21);
  const std::vector<size_t> sizes{16};
  const std::vector<uint64_t> seeds{0};
  const auto cells = make_cells(real, "toy0", sizes, seeds);
  const AuditCell& cell = first_cell(cells);
  const Table train = real.select_rows(cell.train_idx);

  testutil::StubEndpoint stub(
      [&train](size_t, size_t rows) { return testutil::completion_payload_for(train, rows); });

  BenchConfig cfg;
  GeneratorSpec gen;
  gen.id = "icl_stub";
  gen.type = GeneratorSpec::Type::Icl;
  gen.icl.endpoint = stub.endpoint();
  gen.icl.model_name = "stub";
  gen.icl.batch_size = 8;

  const AuditReport rep = run_cell(real, cell, gen, cfg);
  CHECK(rep.status == "ok");
  CHECK(rep.synth_rows == 16);
  CHECK(rep.attack_reports.size() == 8);
  CHECK(stub.hits() == 2);  // 16 rows at batch 8

  // The prompt names the dataset the cell came from.
  CHECK(stub.last_user().find("Dataset name: toy0") != std::string::npos);
}

TEST_CASE("run_benchmark: resume skips cells with existing output") {
  const auto dir = testutil::make_temp_dir("resume");
  BenchConfig cfg = toy_config(dir, 1, {16}, {0, 1});
  cfg.out_dir = (dir / "out").string();

  const BenchResult first = run_benchmark(cfg);
  CHECK(first.reports.size() == 2);
  emit_outputs(first.reports, cfg.out_dir);

  cfg.resume = true;
  const BenchResult second = run_benchmark(cfg);
  CHECK(second.reports.empty());
  REQUIRE(!second.warnings.empty());
  CHECK(second.warnings.back().find("skipped 2 cells") != std::string::npos);

  // A new seed only computes the missing cell.
  cfg.seeds = {0, 1, 2};
  const BenchResult third = run_benchmark(cfg);
  CHECK(third.reports.size() == 1);
  CHECK(third.reports[0].seed == 2);
  emit_outputs(third.reports, cfg.out_dir);
  size_t cell_files = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(cfg.out_dir) / "cells")) {
    if (entry.path().extension() == ".json") ++cell_files;
  }
  CHECK(cell_files == 3);
  fs::remove_all(dir);
}

TEST_CASE("rank_datasets_by_leakage: most leaky first") {
  const auto dir = testutil::make_temp_dir("rank");
  BenchConfig cfg = toy_config(dir, 3, {16}, {0, 1});
  cfg.out_dir = (dir / "out").string();
  const BenchResult result = run_benchmark(cfg);
  emit_outputs(result.reports, cfg.out_dir);

  const auto ranked = rank_datasets_by_leakage(cfg.out_dir);
  REQUIRE(ranked.size() == 3);
  for (size_t i = 1; i < ranked.size(); ++i) {
    CHECK(ranked[i - 1].second >= ranked[i].second);
  }
  fs::remove_all(dir);
}
