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

// Microbenchmarks for the audit hot paths. Run:
//   ./benchmarks/synth_audit_bench --benchmark_min_time=0.1

#include <vector>

#include "benchmark/benchmark.h"

#include "synth_audit/encode.hpp"
#include "synth_audit/generators.hpp"
#include "synth_audit/leakage.hpp"
#include "synth_audit/mia.hpp"
#include "synth_audit/rng.hpp"
#include "synth_audit/table.hpp"

namespace {

using namespace synth_audit;

Table random_table(size_t rows, size_t numeric_cols, uint64_t seed) {
  Rng rng(seed);
  std::vector<ColumnSchema> schema;
  std::vector<Column> columns;
  for (size_t c = 0; c < numeric_cols; ++c) {
    ColumnSchema cs;
    cs.name = "x" + std::to_string(c);
    cs.kind = ColumnKind::Numeric;
    schema.push_back(cs);
    std::vector<double> v(rows);
    for (double& x : v) x = rng.normal();
    columns.emplace_back(std::move(v));
  }
  ColumnSchema target;
  target.name = "y";
  target.kind = ColumnKind::Categorical;
  target.categories = {"c0", "c1"};
  schema.push_back(target);
  std::vector<int32_t> codes(rows);
  for (auto& code : codes) code = rng.uniform() < 0.5 ? 0 : 1;
  columns.emplace_back(std::move(codes));
  return Table(std::move(schema), std::move(columns));
}

void BM_MixedDistance(benchmark::State& state) {
  const auto dims = static_cast<size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> a(dims), b(dims);
  for (size_t i = 0; i < dims; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(mixed_distance(a, b));
  }
}
BENCHMARK(BM_MixedDistance)->Arg(8)->Arg(32)->Arg(128);

void BM_EncodeTable(benchmark::State& state) {
  const Table t = random_table(static_cast<size_t>(state.range(0)), 8, 2);
  const Encoder enc = Encoder::fit(t);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enc.encode(t));
  }
}
BENCHMARK(BM_EncodeTable)->Arg(64)->Arg(512);

void BM_KdeLogDensity(benchmark::State& state) {
  const auto rows = static_cast<size_t>(state.range(0));
  const Table fit = random_table(rows, 8, 3);
  const Table queries = random_table(128, 8, 4);
  const Encoder enc = Encoder::fit(fit);
  const EncodedMatrix fe = enc.encode(fit);
  const EncodedMatrix qe = enc.encode(queries);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kde_log_density(fe, qe));
  }
}
BENCHMARK(BM_KdeLogDensity)->Arg(64)->Arg(256);

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<size_t>(state.range(0));
  Rng rng(5);
  ScoreVector sv;
  sv.scores.resize(n);
  sv.labels.resize(n);
  for (size_t i = 0; i < n; ++i) {
    sv.scores[i] = rng.normal();
    sv.labels[i] = i % 2 == 0 ? 1 : 0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(roc_auc(sv));
  }
}
BENCHMARK(BM_RocAuc)->Arg(128)->Arg(1024)->Arg(8192);

void BM_SmoteGenerate(benchmark::State& state) {
  const auto n = static_cast<size_t>(state.range(0));
  const Table train = random_table(n, 8, 6);
  SmoteConfig cfg;
  cfg.seed = 9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(smote_generate(train, n, cfg));
  }
}
BENCHMARK(BM_SmoteGenerate)->Arg(32)->Arg(128);

void BM_AttackBattery(benchmark::State& state) {
  const auto n = static_cast<size_t>(state.range(0));
  const Table synth = random_table(n, 6, 10);
  const Table reference = random_table(n, 6, 11);
  const Table members = random_table(n, 6, 12);
  const Table nonmembers = random_table(n, 6, 13);
  const auto roster = default_attack_roster();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_attacks(synth, &reference, members, nonmembers, roster, 1));
  }
}
BENCHMARK(BM_AttackBattery)->Unit(benchmark::kMillisecond)->Arg(32)->Arg(64);

void BM_LoadTable(benchmark::State& state) {
  const Table t = random_table(static_cast<size_t>(state.range(0)), 8, 20);
  const std::string csv = to_csv_string(t);
  for (auto _ : state) {
    benchmark::DoNotOptimize(load_table_from_string(csv));
  }
}
BENCHMARK(BM_LoadTable)->Arg(128)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
