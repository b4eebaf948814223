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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synth_audit/fidelity.hpp"
#include "synth_audit/generators.hpp"
#include "synth_audit/icl_client.hpp"
#include "synth_audit/leakage.hpp"
#include "synth_audit/mia.hpp"
#include "synth_audit/protocol.hpp"
#include "synth_audit/table.hpp"
#include "synth_audit/utility_eval.hpp"

namespace synth_audit {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DatasetSpec {
  std::string id;
  std::string path;
  std::optional<std::string> schema_hint_path;
  size_t discretize_bins = 4;  // applied when the target column is numeric
};

struct GeneratorSpec {
  enum class Type { Smote, Marginal, Icl, Files };
  std::string id;
  Type type = Type::Smote;
  SmoteConfig smote;
  IclConfig icl;
  // Files: path template with {dataset}, {n} and {seed} placeholders.
  std::string files_template;
};

struct BenchConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<size_t> sizes{kDefaultSubsetSizes.begin(), kDefaultSubsetSizes.end()};
  std::vector<uint64_t> seeds{kDefaultSeeds.begin(), kDefaultSeeds.end()};
  std::vector<GeneratorSpec> generators;
  std::vector<AttackSpec> attacks = default_attack_roster();
  std::string out_dir;
  size_t jobs = 1;
  double test_frac = kDefaultTestFrac;
  uint64_t split_seed = 0;
  double synth_multiplier = 1.0;  // synthetic rows = round(multiplier * n)
  // Skip cells whose JSON already exists under out_dir/cells; aggregation
  // picks the old files up again.
  bool resume = false;
};

BenchConfig load_bench_config(const std::string& path);
BenchConfig parse_bench_config(const std::string& json_text);

// One audited (dataset, size, seed, generator) cell. Every metric is either
// present or explained by a skip reason; the whole struct serializes to JSON.
struct AuditReport {
  static constexpr int kSchemaVersion = 1;

  std::string dataset_id;
  std::string generator_id;
  std::string arm;  // factorial arm, empty outside factorial runs
  size_t n = 0;
  uint64_t seed = 0;
  size_t train_rows = 0, holdout_rows = 0, reference_rows = 0, synth_rows = 0;

  std::string status = "ok";  // ok | generator_failed | cell_failed
  std::string error;
  std::vector<std::string> warnings;
  std::map<std::string, double> timings_ms;

  // Fidelity vs the cell's train rows.
  std::optional<ColumnShapesResult> column_shapes;
  std::optional<PairTrendsResult> pair_trends;
  std::optional<double> beta_recall;
  std::string fidelity_skip;

  std::optional<UtilityReport> utility;
  std::string utility_skip;

  std::vector<AttackReport> attack_reports;
  std::vector<std::pair<std::string, std::string>> skipped_attacks;  // name, reason
  std::optional<LeakageSummary> leakage;
  std::optional<RareClassResult> rare;
  std::optional<double> prop_closer;
  std::string leakage_skip;

  // 20-bin equal-width value-frequency data per numeric column, binned over
  // the full real table's range; feeds the histogram CSVs.
  struct Histogram {
    std::string column;
    double lo = 0.0, hi = 0.0;
    std::vector<size_t> train_counts;
    std::vector<size_t> synth_counts;
  };
  std::vector<Histogram> histograms;
};

std::string report_to_json(const AuditReport& report);

// Audits an already-materialized (train, holdout, synth) triple: fidelity vs
// train, utility vs holdout, the attack battery with leakage aggregation,
// rare-row analysis and prop_closer. histogram_range, when given, fixes the
// numeric bin ranges (the full real table during benchmark runs).
AuditReport audit_synthetic(const Table& train, const Table& holdout, const Table* reference,
                            const Table& synth, std::span<const AttackSpec> attacks, uint64_t seed,
                            const Table* histogram_range = nullptr);

// Runs the full audit for one cell. Generator or metric failures degrade
// only the affected sections.
AuditReport run_cell(const Table& real, const AuditCell& cell, const GeneratorSpec& generator,
                     const BenchConfig& cfg);

struct BenchResult {
  std::vector<AuditReport> reports;
  size_t failed_cells = 0;
  std::vector<std::string> warnings;
};

// The full dataset x size x seed x generator matrix, executed by a worker
// pool of cfg.jobs threads. Reports come back in deterministic task order
// regardless of thread count.
BenchResult run_benchmark(const BenchConfig& cfg);

// Factorial arms over the prompt knobs (Table-3 shape). Arms apply to ICL
// generators; other generator types run unchanged per arm so the report
// shape is preserved.
struct FactorialArm {
  std::string name;
  std::optional<size_t> batch_size;
  std::optional<double> temperature;
  std::optional<bool> include_summary_stats;
};

std::vector<FactorialArm> default_factorial_arms();

BenchResult run_factorial(const BenchConfig& cfg, const GeneratorSpec& base_generator,
                          std::span<const FactorialArm> arms);

// Writes per-cell JSONs plus the aggregate CSVs (leakage_by_generator.csv,
// leakage_by_size.csv, tradeoff.csv, factorial.csv when arms are present,
// histogram_<dataset>__<column>.csv) and manifest.json. Aggregates are
// always recomputed from the serialized per-cell files, so re-aggregation
// reproduces them byte for byte.
void emit_outputs(const std::vector<AuditReport>& reports, const std::string& out_dir);

// Re-derives every aggregate CSV from an existing out_dir/cells directory.
void aggregate_outputs(const std::string& out_dir);

// Mean worst-case AUC per dataset from a cells directory, sorted most leaky
// first; backs the factorial --top-k-leaky selection.
std::vector<std::pair<std::string, double>> rank_datasets_by_leakage(const std::string& out_dir);

}  // namespace synth_audit
