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

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "synth_audit/rng.hpp"

namespace synth_audit {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string fpr_key(double fpr) { return format_double(fpr); }

std::string sanitize(std::string_view s) {
  std::string out;
  for (const char c : s) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  }
  return out;
}

class StageTimer {
 public:
  StageTimer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }
  void reset() { start_ = std::chrono::steady_clock::now(); }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string render_files_template(const std::string& tmpl, const AuditCell& cell) {
  std::string out = tmpl;
  const auto replace_all = [&out](std::string_view key, const std::string& value) {
    size_t pos = 0;
    while ((pos = out.find(key, pos)) != std::string::npos) {
      out.replace(pos, key.size(), value);
      pos += value.size();
    }
  };
  replace_all("{dataset}", cell.dataset_id);
  replace_all("{n}", std::to_string(cell.n));
  replace_all("{seed}", std::to_string(cell.seed));
  return out;
}

Table generate_synth(const GeneratorSpec& gen, const Table& real, const Table& train, size_t n_out,
                     uint64_t seed, const AuditCell& cell, std::vector<std::string>* warnings) {
  switch (gen.type) {
    case GeneratorSpec::Type::Smote: {
      SmoteConfig cfg = gen.smote;
      cfg.seed = seed;
      return smote_generate(train, n_out, cfg, warnings);
    }
    case GeneratorSpec::Type::Marginal:
      return marginal_generate(train, n_out, seed);
    case GeneratorSpec::Type::Icl: {
      IclConfig cfg = gen.icl;
      cfg.seed = seed;
      cfg.dataset_name = cell.dataset_id;
      IclResult result = icl_generate(train, n_out, cfg);
      if (warnings && result.log.retry_count() > 0) {
        warnings->push_back("icl: " + std::to_string(result.log.retry_count()) + " retries over " +
                            std::to_string(result.log.request_count()) + " requests");
      }
      return std::move(result.table);
    }
    case GeneratorSpec::Type::Files: {
      const std::string path = render_files_template(gen.files_template, cell);
      SchemaHint hint;
      for (const ColumnSchema& col : real.schema()) hint[col.name] = col.kind;
      Table synth = load_table(path, &hint);
      if (!synth.schema_compatible(real)) {
        throw LoadError("pre-generated file " + path + " does not match the dataset schema");
      }
      return synth;
    }
  }
  throw std::logic_error("generate_synth: unknown generator type");
}

size_t fixed_range_bin(double v, double lo, double hi, size_t k) {
  if (hi <= lo) return 0;
  const double pos = (v - lo) / (hi - lo) * static_cast<double>(k);
  const auto bin = static_cast<long long>(std::floor(pos));
  return static_cast<size_t>(std::clamp(bin, 0LL, static_cast<long long>(k) - 1LL));
}

constexpr size_t kHistogramBins = 20;

std::string cell_file_name(const std::string& dataset, const std::string& generator,
                           const std::string& arm, size_t n, uint64_t seed) {
  std::string name = sanitize(dataset) + "__" + sanitize(generator);
  if (!arm.empty()) name += "__" + sanitize(arm);
  return name + "__n" + std::to_string(n) + "__s" + std::to_string(seed) + ".json";
}

}  // namespace

//===----------------------------------------------------------------------===//
// Config
//===----------------------------------------------------------------------===//

namespace {

GeneratorSpec parse_generator(const nlohmann::json& j) {
  GeneratorSpec gen;
  if (!j.contains("id") || !j.contains("type")) {
    throw ConfigError("generator entries need \"id\" and \"type\"");
  }
  gen.id = j["id"].get<std::string>();
  const std::string type = j["type"].get<std::string>();
  if (type == "smote") {
    gen.type = GeneratorSpec::Type::Smote;
    if (j.contains("k")) gen.smote.k = j["k"].get<size_t>();
    if (j.contains("alpha")) gen.smote.alpha = j["alpha"].get<double>();
  } else if (type == "marginal") {
    gen.type = GeneratorSpec::Type::Marginal;
  } else if (type == "icl") {
    gen.type = GeneratorSpec::Type::Icl;
    if (!j.contains("endpoint") || !j.contains("model")) {
      throw ConfigError("icl generator '" + gen.id + "' needs \"endpoint\" and \"model\"");
    }
    gen.icl.endpoint = j["endpoint"].get<std::string>();
    gen.icl.model_name = j["model"].get<std::string>();
    if (j.contains("temperature")) gen.icl.temperature = j["temperature"].get<double>();
    if (j.contains("batch_size")) gen.icl.batch_size = j["batch_size"].get<size_t>();
    if (j.contains("include_summary_stats")) {
      gen.icl.include_summary_stats = j["include_summary_stats"].get<bool>();
    }
    if (j.contains("max_retries")) gen.icl.max_retries = j["max_retries"].get<size_t>();
    if (j.contains("full_data_prompt")) gen.icl.full_data_prompt = j["full_data_prompt"].get<bool>();
  } else if (type == "files") {
    gen.type = GeneratorSpec::Type::Files;
    if (!j.contains("path_template")) {
      throw ConfigError("files generator '" + gen.id + "' needs \"path_template\"");
    }
    gen.files_template = j["path_template"].get<std::string>();
  } else {
    throw ConfigError("unknown generator type '" + type + "'");
  }
  return gen;
}

}  // namespace

BenchConfig parse_bench_config(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config is not a JSON object");

  BenchConfig cfg;
  try {
    if (!j.contains("datasets") || !j["datasets"].is_array() || j["datasets"].empty()) {
      throw ConfigError("config needs a nonempty \"datasets\" array");
    }
    for (const auto& d : j["datasets"]) {
      DatasetSpec spec;
      spec.path = d.at("path").get<std::string>();
      spec.id = d.contains("id") ? d["id"].get<std::string>()
                                 : fs::path(spec.path).stem().string();
      if (d.contains("schema_hint")) spec.schema_hint_path = d["schema_hint"].get<std::string>();
      if (d.contains("discretize_bins")) spec.discretize_bins = d["discretize_bins"].get<size_t>();
      cfg.datasets.push_back(std::move(spec));
    }
    if (!j.contains("generators") || !j["generators"].is_array() || j["generators"].empty()) {
      throw ConfigError("config needs a nonempty \"generators\" array");
    }
    for (const auto& g : j["generators"]) cfg.generators.push_back(parse_generator(g));

    if (j.contains("sizes")) cfg.sizes = j["sizes"].get<std::vector<size_t>>();
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<uint64_t>>();
    if (j.contains("attacks")) {
      cfg.attacks.clear();
      for (const auto& a : j["attacks"]) {
        const auto name = attack_from_string(a.get<std::string>());
        if (!name) throw ConfigError("unknown attack '" + a.get<std::string>() + "'");
        cfg.attacks.push_back(make_attack_spec(*name));
      }
    }
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<size_t>();
    if (j.contains("test_frac")) cfg.test_frac = j["test_frac"].get<double>();
    if (j.contains("split_seed")) cfg.split_seed = j["split_seed"].get<uint64_t>();
    if (j.contains("synth_multiplier")) cfg.synth_multiplier = j["synth_multiplier"].get<double>();
    if (j.contains("resume")) cfg.resume = j["resume"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.sizes.empty() || cfg.seeds.empty()) {
    throw ConfigError("config: sizes and seeds must be nonempty");
  }
  if (cfg.jobs == 0) cfg.jobs = 1;
  return cfg;
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  BenchConfig cfg = parse_bench_config(ss.str());
  for (const DatasetSpec& d : cfg.datasets) {
    if (!fs::exists(d.path)) throw ConfigError("dataset file missing: " + d.path);
    if (d.schema_hint_path && !fs::exists(*d.schema_hint_path)) {
      throw ConfigError("schema hint missing: " + *d.schema_hint_path);
    }
  }
  return cfg;
}

//===----------------------------------------------------------------------===//
// Report serialization
//===----------------------------------------------------------------------===//

std::string report_to_json(const AuditReport& r) {
  ordered_json j;
  j["schema_version"] = AuditReport::kSchemaVersion;
  j["dataset_id"] = r.dataset_id;
  j["generator_id"] = r.generator_id;
  j["arm"] = r.arm;
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["rows"] = ordered_json{{"train", r.train_rows},
                           {"holdout", r.holdout_rows},
                           {"reference", r.reference_rows},
                           {"synthetic", r.synth_rows}};
  j["status"] = r.status;
  j["error"] = r.error;
  j["warnings"] = r.warnings;
  j["timings_ms"] = r.timings_ms;

  ordered_json fidelity;
  fidelity["skip_reason"] = r.fidelity_skip;
  if (r.column_shapes) {
    ordered_json cols = ordered_json::array();
    for (const auto& c : r.column_shapes->columns) {
      cols.push_back(ordered_json{{"column", c.column}, {"score", c.score}});
    }
    fidelity["column_shapes"] = ordered_json{{"mean", r.column_shapes->mean}, {"columns", cols}};
  } else {
    fidelity["column_shapes"] = nullptr;
  }
  if (r.pair_trends) {
    ordered_json pairs = ordered_json::array();
    for (const auto& p : r.pair_trends->pairs) {
      pairs.push_back(ordered_json{{"a", p.column_a},
                                   {"b", p.column_b},
                                   {"score", p.score},
                                   {"constant_column", p.constant_column}});
    }
    fidelity["pair_trends"] = ordered_json{{"mean", r.pair_trends->mean}, {"pairs", pairs}};
  } else {
    fidelity["pair_trends"] = nullptr;
  }
  fidelity["beta_recall"] = r.beta_recall ? ordered_json(*r.beta_recall) : ordered_json(nullptr);
  j["fidelity"] = fidelity;

  ordered_json utility;
  utility["skip_reason"] = r.utility_skip;
  if (r.utility) {
    utility["mean_macro_auc"] =
        r.utility->mean_macro_auc ? ordered_json(*r.utility->mean_macro_auc) : ordered_json(nullptr);
    ordered_json clfs = ordered_json::array();
    for (const auto& c : r.utility->classifiers) {
      clfs.push_back(ordered_json{
          {"name", c.name},
          {"macro_auc", c.macro_auc ? ordered_json(*c.macro_auc) : ordered_json(nullptr)},
          {"failure", c.failure_reason},
          {"flagged_classes", c.flagged_classes},
          {"skipped_classes", c.skipped_classes}});
    }
    utility["classifiers"] = clfs;
  } else {
    utility["mean_macro_auc"] = nullptr;
    utility["classifiers"] = ordered_json::array();
  }
  j["utility"] = utility;

  ordered_json leakage;
  leakage["skip_reason"] = r.leakage_skip;
  ordered_json attacks = ordered_json::array();
  for (const AttackReport& a : r.attack_reports) {
    ordered_json tpr;
    for (size_t i = 0; i < kFprGrid.size(); ++i) tpr[fpr_key(kFprGrid[i])] = a.tpr[i];
    attacks.push_back(ordered_json{{"name", to_string(a.spec.name)},
                                   {"threat", to_string(a.spec.threat)},
                                   {"auc", a.auc},
                                   {"tpr_at_fpr", tpr}});
  }
  leakage["attacks"] = attacks;
  ordered_json skipped = ordered_json::array();
  for (const auto& [name, reason] : r.skipped_attacks) {
    skipped.push_back(ordered_json{{"name", name}, {"reason", reason}});
  }
  leakage["skipped_attacks"] = skipped;
  if (r.leakage) {
    ordered_json tpr;
    for (size_t i = 0; i < kFprGrid.size(); ++i) tpr[fpr_key(kFprGrid[i])] = r.leakage->worst_tpr[i];
    leakage["worst_case"] = ordered_json{{"auc", r.leakage->worst_case_auc},
                                         {"attack", to_string(r.leakage->worst_attack.name)},
                                         {"tpr_at_fpr", tpr}};
  } else {
    leakage["worst_case"] = nullptr;
  }
  if (r.rare) {
    leakage["rare_class"] =
        ordered_json{{"rare_rows", r.rare->rare_rows},
                     {"auc", r.rare->auc ? ordered_json(*r.rare->auc) : ordered_json(nullptr)},
                     {"attack", r.rare->worst_attack ? ordered_json(to_string(*r.rare->worst_attack))
                                                     : ordered_json(nullptr)},
                     {"reason", r.rare->undefined_reason}};
  } else {
    leakage["rare_class"] = nullptr;
  }
  leakage["prop_closer"] = r.prop_closer ? ordered_json(*r.prop_closer) : ordered_json(nullptr);
  j["leakage"] = leakage;

  ordered_json hists = ordered_json::array();
  for (const auto& h : r.histograms) {
    hists.push_back(ordered_json{{"column", h.column},
                                 {"lo", h.lo},
                                 {"hi", h.hi},
                                 {"train_counts", h.train_counts},
                                 {"synth_counts", h.synth_counts}});
  }
  j["histograms"] = hists;
  return j.dump(1);
}

//===----------------------------------------------------------------------===//
// Cell execution
//===----------------------------------------------------------------------===//

AuditReport audit_synthetic(const Table& train, const Table& holdout, const Table* reference,
                            const Table& synth, std::span<const AttackSpec> attacks, uint64_t seed,
                            const Table* histogram_range) {
  AuditReport rep;
  rep.train_rows = train.row_count();
  rep.holdout_rows = holdout.row_count();
  rep.reference_rows = reference ? reference->row_count() : 0;
  rep.synth_rows = synth.row_count();

  // Fidelity vs the generator's training rows.
  StageTimer timer;
  try {
    rep.column_shapes = column_shapes(train, synth);
  } catch (const std::exception& e) {
    rep.warnings.push_back(std::string("column_shapes skipped: ") + e.what());
  }
  try {
    rep.pair_trends = pair_trends(train, synth);
  } catch (const std::exception& e) {
    rep.warnings.push_back(std::string("pair_trends skipped: ") + e.what());
  }
  try {
    rep.beta_recall = beta_recall(train, synth);
  } catch (const std::exception& e) {
    rep.warnings.push_back(std::string("beta_recall skipped: ") + e.what());
  }
  if (!rep.column_shapes && !rep.pair_trends && !rep.beta_recall) {
    rep.fidelity_skip = "all fidelity metrics failed";
  }
  rep.timings_ms["fidelity"] = timer.ms();

  timer.reset();
  try {
    rep.utility = eval_utility(synth, holdout, seed_combine(seed, fnv1a("utility")));
  } catch (const std::exception& e) {
    rep.utility_skip = e.what();
  }
  rep.timings_ms["utility"] = timer.ms();

  timer.reset();
  try {
    const AttackBattery battery =
        run_attacks(synth, reference, train, holdout, attacks, seed_combine(seed, fnv1a("attacks")));
    for (const AttackRun& run : battery.runs) {
      if (run.scores) {
        rep.attack_reports.push_back(evaluate_attack(run.spec, *run.scores));
      } else {
        rep.skipped_attacks.emplace_back(to_string(run.spec.name), run.skip_reason);
      }
    }
    rep.timings_ms["attacks"] = timer.ms();
    timer.reset();
    if (!rep.attack_reports.empty()) {
      rep.leakage = worst_case(rep.attack_reports);
      const auto mask = rare_mask(train, battery.queries.rows);
      rep.rare = rare_class_auc(battery.runs, mask);
    } else {
      rep.leakage_skip = "no attacks produced scores";
    }
    rep.prop_closer = prop_closer(synth, train, holdout);
  } catch (const std::exception& e) {
    rep.leakage_skip = e.what();
    rep.timings_ms.try_emplace("attacks", timer.ms());
  }
  rep.timings_ms["leakage"] = timer.ms();

  // Value-frequency histograms: 20 equal-width bins over the reference
  // range (the full real table in benchmark runs, train + holdout otherwise).
  const std::optional<Table> fallback_range =
      histogram_range == nullptr ? std::optional<Table>(concat_rows(train, holdout)) : std::nullopt;
  const Table& range = histogram_range ? *histogram_range : *fallback_range;
  for (size_t c = 0; c < range.column_count(); ++c) {
    if (!range.is_numeric(c)) continue;
    const auto& rv = range.numeric(c);
    const auto [lo_it, hi_it] = std::minmax_element(rv.begin(), rv.end());
    AuditReport::Histogram hist;
    hist.column = range.schema(c).name;
    hist.lo = *lo_it;
    hist.hi = *hi_it;
    hist.train_counts.assign(kHistogramBins, 0);
    hist.synth_counts.assign(kHistogramBins, 0);
    for (const double v : train.numeric(c)) {
      ++hist.train_counts[fixed_range_bin(v, hist.lo, hist.hi, kHistogramBins)];
    }
    for (const double v : synth.numeric(c)) {
      ++hist.synth_counts[fixed_range_bin(v, hist.lo, hist.hi, kHistogramBins)];
    }
    rep.histograms.push_back(std::move(hist));
  }
  return rep;
}

AuditReport run_cell(const Table& real, const AuditCell& cell, const GeneratorSpec& generator,
                     const BenchConfig& cfg) {
  const uint64_t cell_seed = seed_combine(cell.seed, fnv1a(generator.id));
  const Table train = real.select_rows(cell.train_idx);
  const Table holdout = real.select_rows(cell.holdout_idx);
  std::optional<Table> reference;
  if (!cell.reference_idx.empty()) reference = real.select_rows(cell.reference_idx);

  const auto n_out = static_cast<size_t>(
      std::max<long long>(1, std::llround(cfg.synth_multiplier * static_cast<double>(cell.n))));

  StageTimer timer;
  Table synth;
  std::vector<std::string> generator_warnings;
  try {
    synth = generate_synth(generator, real, train, n_out, cell_seed, cell, &generator_warnings);
  } catch (const std::exception& e) {
    AuditReport rep;
    rep.dataset_id = cell.dataset_id;
    rep.generator_id = generator.id;
    rep.n = cell.n;
    rep.seed = cell.seed;
    rep.train_rows = cell.train_idx.size();
    rep.holdout_rows = cell.holdout_idx.size();
    rep.reference_rows = cell.reference_idx.size();
    rep.warnings = std::move(generator_warnings);
    rep.status = "generator_failed";
    rep.error = e.what();
    rep.fidelity_skip = "generator failed";
    rep.utility_skip = "generator failed";
    rep.leakage_skip = "generator failed";
    rep.timings_ms["generate"] = timer.ms();
    return rep;
  }
  const double generate_ms = timer.ms();

  AuditReport rep = audit_synthetic(train, holdout, reference ? &*reference : nullptr, synth,
                                    cfg.attacks, cell_seed, &real);
  rep.dataset_id = cell.dataset_id;
  rep.generator_id = generator.id;
  rep.n = cell.n;
  rep.seed = cell.seed;
  rep.warnings.insert(rep.warnings.begin(), generator_warnings.begin(), generator_warnings.end());
  rep.timings_ms["generate"] = generate_ms;
  return rep;
}

//===----------------------------------------------------------------------===//
// Benchmark matrix
//===----------------------------------------------------------------------===//

namespace {

struct PreparedDataset {
  DatasetSpec spec;
  Table table;
  std::vector<AuditCell> cells;
};

std::vector<PreparedDataset> prepare_datasets(const BenchConfig& cfg,
                                              std::vector<std::string>* warnings) {
  std::vector<PreparedDataset> out;
  for (const DatasetSpec& spec : cfg.datasets) {
    PreparedDataset prep;
    prep.spec = spec;
    SchemaHint hint;
    const SchemaHint* hint_ptr = nullptr;
    if (spec.schema_hint_path) {
      hint = load_schema_hint(*spec.schema_hint_path);
      hint_ptr = &hint;
    }
    Table t = load_table(spec.path, hint_ptr);
    if (t.is_numeric(t.target_column())) {
      t = discretize_target(t, spec.discretize_bins);
      if (warnings) {
        warnings->push_back("dataset " + spec.id + ": numeric target discretized into " +
                            std::to_string(spec.discretize_bins) + " quantile bins");
      }
    }
    prep.cells = make_cells(t, spec.id, cfg.sizes, cfg.seeds, cfg.test_frac, cfg.split_seed,
                            warnings);
    prep.table = std::move(t);
    out.push_back(std::move(prep));
  }
  return out;
}

struct Task {
  const PreparedDataset* dataset = nullptr;
  const AuditCell* cell = nullptr;
  GeneratorSpec generator;  // by value: factorial arms adjust knobs
  std::string arm;
  std::string arm_config;
};

// Drops tasks whose per-cell JSON already exists (resume mode).
std::vector<Task> without_existing(std::vector<Task> tasks, const BenchConfig& cfg,
                                   std::vector<std::string>* warnings) {
  if (!cfg.resume || cfg.out_dir.empty()) return tasks;
  const fs::path cells_dir = fs::path(cfg.out_dir) / "cells";
  std::vector<Task> fresh;
  size_t skipped = 0;
  for (Task& task : tasks) {
    const fs::path file = cells_dir / cell_file_name(task.cell->dataset_id, task.generator.id,
                                                     task.arm, task.cell->n, task.cell->seed);
    if (fs::exists(file)) {
      ++skipped;
    } else {
      fresh.push_back(std::move(task));
    }
  }
  if (skipped > 0 && warnings) {
    warnings->push_back("resume: skipped " + std::to_string(skipped) +
                        " cells with existing output");
  }
  return fresh;
}

BenchResult execute_tasks(const std::vector<Task>& tasks, const BenchConfig& cfg) {
  BenchResult result;
  result.reports.resize(tasks.size());
  std::atomic<size_t> next{0};
  const size_t jobs = std::max<size_t>(1, std::min(cfg.jobs, tasks.size()));

  const auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& task = tasks[i];
      AuditReport rep;
      try {
        rep = run_cell(task.dataset->table, *task.cell, task.generator, cfg);
      } catch (const std::exception& e) {
        rep.dataset_id = task.cell->dataset_id;
        rep.generator_id = task.generator.id;
        rep.n = task.cell->n;
        rep.seed = task.cell->seed;
        rep.status = "cell_failed";
        rep.error = e.what();
      }
      rep.arm = task.arm;
      if (!task.arm_config.empty()) rep.warnings.push_back(task.arm_config);
      result.reports[i] = std::move(rep);
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  for (const AuditReport& rep : result.reports) {
    if (rep.status != "ok") ++result.failed_cells;
  }
  return result;
}

}  // namespace

BenchResult run_benchmark(const BenchConfig& cfg) {
  if (cfg.datasets.empty() || cfg.generators.empty()) {
    throw ConfigError("run_benchmark: need at least one dataset and one generator");
  }
  BenchResult result;
  const auto prepared = prepare_datasets(cfg, &result.warnings);

  std::vector<Task> tasks;
  for (const PreparedDataset& prep : prepared) {
    for (const GeneratorSpec& gen : cfg.generators) {
      for (const AuditCell& cell : prep.cells) {
        tasks.push_back(Task{&prep, &cell, gen, "", ""});
      }
    }
  }
  tasks = without_existing(std::move(tasks), cfg, &result.warnings);
  BenchResult executed = execute_tasks(tasks, cfg);
  executed.warnings.insert(executed.warnings.begin(), result.warnings.begin(),
                           result.warnings.end());
  return executed;
}

std::vector<FactorialArm> default_factorial_arms() {
  return {
      {"default", 100, 1.0, true},
      {"batch_size_10", 10, std::nullopt, std::nullopt},
      {"no_summary_stats", std::nullopt, std::nullopt, false},
      {"temperature_0.1", std::nullopt, 0.1, std::nullopt},
      {"temperature_0.5", std::nullopt, 0.5, std::nullopt},
  };
}

BenchResult run_factorial(const BenchConfig& cfg, const GeneratorSpec& base_generator,
                          std::span<const FactorialArm> arms) {
  if (cfg.datasets.empty()) throw ConfigError("run_factorial: need at least one dataset");
  if (arms.empty()) throw ConfigError("run_factorial: need at least one arm");

  BenchResult result;
  const auto prepared = prepare_datasets(cfg, &result.warnings);

  std::vector<Task> tasks;
  for (const FactorialArm& arm : arms) {
    GeneratorSpec gen = base_generator;
    // Each arm is a single-knob deviation from the factorial baseline
    // (batch 100, temperature 1.0, stats on).
    if (gen.type == GeneratorSpec::Type::Icl) {
      gen.icl.batch_size = 100;
      gen.icl.temperature = 1.0;
      gen.icl.include_summary_stats = true;
      if (arm.batch_size) gen.icl.batch_size = *arm.batch_size;
      if (arm.temperature) gen.icl.temperature = *arm.temperature;
      if (arm.include_summary_stats) gen.icl.include_summary_stats = *arm.include_summary_stats;
    }
    std::string arm_config = "arm " + arm.name;
    if (gen.type == GeneratorSpec::Type::Icl) {
      arm_config += ": batch_size=" + std::to_string(gen.icl.batch_size) +
                    " temperature=" + format_double(gen.icl.temperature) +
                    " summary_stats=" + (gen.icl.include_summary_stats ? "on" : "off");
    } else {
      arm_config += ": knobs ignored by generator type";
    }
    for (const PreparedDataset& prep : prepared) {
      for (const AuditCell& cell : prep.cells) {
        Task task;
        task.dataset = &prep;
        task.cell = &cell;
        task.generator = gen;
        task.arm = arm.name;
        task.arm_config = arm_config;
        tasks.push_back(std::move(task));
      }
    }
  }
  tasks = without_existing(std::move(tasks), cfg, &result.warnings);
  BenchResult executed = execute_tasks(tasks, cfg);
  executed.warnings.insert(executed.warnings.begin(), result.warnings.begin(),
                           result.warnings.end());
  return executed;
}

//===----------------------------------------------------------------------===//
// Output emission and aggregation
//===----------------------------------------------------------------------===//

namespace {

struct CellMetrics {
  std::string file;
  std::string dataset, generator, arm, status;
  size_t n = 0;
  uint64_t seed = 0;
  std::optional<double> worst_auc;
  std::array<std::optional<double>, kFprGrid.size()> tpr;
  std::optional<double> shapes, trends, beta, utility, prop_closer, rare_auc;
  struct Hist {
    std::string column;
    double lo = 0.0, hi = 0.0;
    std::vector<double> train_counts, synth_counts;
  };
  std::vector<Hist> hists;
};

std::optional<double> opt_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  return std::nullopt;
}

std::vector<CellMetrics> read_cells(const std::string& out_dir) {
  const fs::path cells_dir = fs::path(out_dir) / "cells";
  if (!fs::exists(cells_dir)) throw ConfigError("no cells directory under " + out_dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(cells_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<CellMetrics> cells;
  for (const fs::path& file : files) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto j = nlohmann::json::parse(ss.str(), nullptr, false);
    if (j.is_discarded()) throw ConfigError("unparseable cell JSON: " + file.string());

    CellMetrics m;
    m.file = file.filename().string();
    m.dataset = j.at("dataset_id").get<std::string>();
    m.generator = j.at("generator_id").get<std::string>();
    m.arm = j.value("arm", "");
    m.n = j.at("n").get<size_t>();
    m.seed = j.at("seed").get<uint64_t>();
    m.status = j.at("status").get<std::string>();
    const auto& leakage = j.at("leakage");
    if (leakage.contains("worst_case") && leakage["worst_case"].is_object()) {
      m.worst_auc = opt_number(leakage["worst_case"]["auc"]);
      for (size_t i = 0; i < kFprGrid.size(); ++i) {
        m.tpr[i] = opt_number(leakage["worst_case"]["tpr_at_fpr"].at(fpr_key(kFprGrid[i])));
      }
    }
    if (leakage.contains("rare_class") && leakage["rare_class"].is_object()) {
      m.rare_auc = opt_number(leakage["rare_class"]["auc"]);
    }
    m.prop_closer = opt_number(leakage.at("prop_closer"));
    const auto& fidelity = j.at("fidelity");
    if (fidelity["column_shapes"].is_object()) {
      m.shapes = opt_number(fidelity["column_shapes"]["mean"]);
    }
    if (fidelity["pair_trends"].is_object()) {
      m.trends = opt_number(fidelity["pair_trends"]["mean"]);
    }
    m.beta = opt_number(fidelity.at("beta_recall"));
    m.utility = opt_number(j.at("utility").at("mean_macro_auc"));
    for (const auto& h : j.at("histograms")) {
      CellMetrics::Hist hist;
      hist.column = h.at("column").get<std::string>();
      hist.lo = h.at("lo").get<double>();
      hist.hi = h.at("hi").get<double>();
      hist.train_counts = h.at("train_counts").get<std::vector<double>>();
      hist.synth_counts = h.at("synth_counts").get<std::vector<double>>();
      m.hists.push_back(std::move(hist));
    }
    cells.push_back(std::move(m));
  }
  return cells;
}

std::string generator_label(const CellMetrics& m) {
  return m.arm.empty() ? m.generator : m.generator + "@" + m.arm;
}

double mean_of_vec(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double pop_std_of_vec(const std::vector<double>& v) {
  const double m = mean_of_vec(v);
  double s = 0.0;
  for (const double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::string csv_number(std::optional<double> v) { return v ? format_double(*v) : ""; }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

// Collects a named metric across cells, skipping absent values.
template <typename Getter>
std::vector<double> collect(const std::vector<const CellMetrics*>& cells, Getter getter) {
  std::vector<double> out;
  for (const CellMetrics* m : cells) {
    if (const auto v = getter(*m)) out.push_back(*v);
  }
  return out;
}

void write_aggregates(const std::vector<CellMetrics>& cells, const std::string& out_dir) {
  // Group ok-cells by generator label.
  std::map<std::string, std::vector<const CellMetrics*>> by_generator;
  std::map<std::pair<std::string, size_t>, std::vector<const CellMetrics*>> by_generator_size;
  std::map<std::string, std::vector<const CellMetrics*>> by_arm;
  for (const CellMetrics& m : cells) {
    if (m.status != "ok") continue;
    by_generator[generator_label(m)].push_back(&m);
    by_generator_size[{generator_label(m), m.n}].push_back(&m);
    if (!m.arm.empty()) by_arm[m.arm].push_back(&m);
  }

  // leakage_by_generator.csv
  {
    std::string csv = "generator,cells,auc_mean,auc_std";
    for (const double fpr : kFprGrid) {
      csv += ",tpr@" + fpr_key(fpr) + "_mean,tpr@" + fpr_key(fpr) + "_std";
    }
    csv += "\n";
    for (const auto& [label, group] : by_generator) {
      const auto aucs = collect(group, [](const CellMetrics& m) { return m.worst_auc; });
      if (aucs.empty()) continue;
      csv += label + "," + std::to_string(aucs.size()) + "," + format_double(mean_of_vec(aucs)) +
             "," + format_double(pop_std_of_vec(aucs));
      for (size_t i = 0; i < kFprGrid.size(); ++i) {
        const auto t = collect(group, [i](const CellMetrics& m) { return m.tpr[i]; });
        csv += t.empty() ? ",," : "," + format_double(mean_of_vec(t)) + "," +
                                      format_double(pop_std_of_vec(t));
      }
      csv += "\n";
    }
    write_file(fs::path(out_dir) / "leakage_by_generator.csv", csv);
  }

  // leakage_by_size.csv
  {
    std::string csv = "generator,n,cells,auc_mean,auc_std\n";
    for (const auto& [key, group] : by_generator_size) {
      const auto aucs = collect(group, [](const CellMetrics& m) { return m.worst_auc; });
      if (aucs.empty()) continue;
      csv += key.first + "," + std::to_string(key.second) + "," + std::to_string(aucs.size()) +
             "," + format_double(mean_of_vec(aucs)) + "," + format_double(pop_std_of_vec(aucs)) +
             "\n";
    }
    write_file(fs::path(out_dir) / "leakage_by_size.csv", csv);
  }

  // tradeoff.csv: one row per generator x quality metric, pairing the mean
  // worst-case AUC with the mean quality score.
  {
    std::string csv = "generator,metric,quality_mean,worst_auc_mean\n";
    const std::vector<std::pair<std::string, std::function<std::optional<double>(const CellMetrics&)>>>
        metrics = {
            {"shape", [](const CellMetrics& m) { return m.shapes; }},
            {"corr", [](const CellMetrics& m) { return m.trends; }},
            {"utility", [](const CellMetrics& m) { return m.utility; }},
            {"beta_recall", [](const CellMetrics& m) { return m.beta; }},
        };
    for (const auto& [label, group] : by_generator) {
      const auto aucs = collect(group, [](const CellMetrics& m) { return m.worst_auc; });
      const std::string auc_text = aucs.empty() ? "" : format_double(mean_of_vec(aucs));
      for (const auto& [metric_name, getter] : metrics) {
        const auto vals = collect(group, getter);
        csv += label + "," + metric_name + "," +
               (vals.empty() ? "" : format_double(mean_of_vec(vals))) + "," + auc_text + "\n";
      }
    }
    write_file(fs::path(out_dir) / "tradeoff.csv", csv);
  }

  // factorial.csv: only when factorial arms are present.
  if (!by_arm.empty()) {
    std::string csv = "arm,max_attack_auc,avg_shape,corr_similarity,prop_closer,rare_class_auc\n";
    for (const auto& [arm, group] : by_arm) {
      const auto auc = collect(group, [](const CellMetrics& m) { return m.worst_auc; });
      const auto shape = collect(group, [](const CellMetrics& m) { return m.shapes; });
      const auto corr = collect(group, [](const CellMetrics& m) { return m.trends; });
      const auto closer = collect(group, [](const CellMetrics& m) { return m.prop_closer; });
      const auto rare = collect(group, [](const CellMetrics& m) { return m.rare_auc; });
      const auto cell_text = [](const std::vector<double>& v) {
        return v.empty() ? std::string() : format_double(mean_of_vec(v));
      };
      csv += arm + "," + cell_text(auc) + "," + cell_text(shape) + "," + cell_text(corr) + "," +
             cell_text(closer) + "," + cell_text(rare) + "\n";
    }
    write_file(fs::path(out_dir) / "factorial.csv", csv);
  }

  // Histograms: pooled per (dataset, column); synthetic counts stack per
  // generator label, train counts come from the first generator label so
  // repeated generators do not double-count the same train rows.
  {
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<double>>>
        synth_by_key;
    std::map<std::pair<std::string, std::string>, std::vector<double>> train_by_key;
    std::map<std::pair<std::string, std::string>, std::pair<double, double>> range_by_key;
    std::map<std::pair<std::string, std::string>, std::string> train_source;
    for (const CellMetrics& m : cells) {
      if (m.status != "ok") continue;
      const std::string label = generator_label(m);
      for (const auto& h : m.hists) {
        const auto key = std::make_pair(m.dataset, h.column);
        range_by_key.emplace(key, std::make_pair(h.lo, h.hi));
        auto& synth = synth_by_key[key][label];
        if (synth.empty()) synth.assign(h.synth_counts.size(), 0.0);
        for (size_t i = 0; i < h.synth_counts.size(); ++i) synth[i] += h.synth_counts[i];
        auto src = train_source.find(key);
        if (src == train_source.end()) {
          train_source.emplace(key, label);
          train_by_key[key].assign(h.train_counts.size(), 0.0);
          src = train_source.find(key);
        }
        if (src->second == label) {
          auto& train = train_by_key[key];
          for (size_t i = 0; i < h.train_counts.size(); ++i) train[i] += h.train_counts[i];
        }
      }
    }
    for (const auto& [key, by_label] : synth_by_key) {
      const auto [lo, hi] = range_by_key[key];
      const auto& train = train_by_key[key];
      std::string csv = "bin,lo,hi,train_count";
      for (const auto& [label, counts] : by_label) csv += "," + label + "_count";
      csv += "\n";
      const size_t bins = train.size();
      const double width = bins > 0 ? (hi - lo) / static_cast<double>(bins) : 0.0;
      for (size_t b = 0; b < bins; ++b) {
        csv += std::to_string(b) + "," + format_double(lo + width * static_cast<double>(b)) + "," +
               format_double(b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1)) + "," +
               format_double(train[b]);
        for (const auto& [label, counts] : by_label) csv += "," + format_double(counts[b]);
        csv += "\n";
      }
      write_file(fs::path(out_dir) /
                     ("histogram_" + sanitize(key.first) + "__" + sanitize(key.second) + ".csv"),
                 csv);
    }
  }

  // manifest.json
  {
    ordered_json manifest;
    manifest["schema_version"] = AuditReport::kSchemaVersion;
    size_t ok = 0;
    ordered_json list = ordered_json::array();
    for (const CellMetrics& m : cells) {
      if (m.status == "ok") ++ok;
      list.push_back(ordered_json{{"file", m.file},
                                  {"dataset_id", m.dataset},
                                  {"generator_id", m.generator},
                                  {"arm", m.arm},
                                  {"n", m.n},
                                  {"seed", m.seed},
                                  {"status", m.status}});
    }
    manifest["total_cells"] = cells.size();
    manifest["ok_cells"] = ok;
    manifest["failed_cells"] = cells.size() - ok;
    manifest["cells"] = list;
    write_file(fs::path(out_dir) / "manifest.json", manifest.dump(1));
  }
}

}  // namespace

void emit_outputs(const std::vector<AuditReport>& reports, const std::string& out_dir) {
  const fs::path cells_dir = fs::path(out_dir) / "cells";
  fs::create_directories(cells_dir);
  for (const AuditReport& rep : reports) {
    write_file(cells_dir / cell_file_name(rep.dataset_id, rep.generator_id, rep.arm, rep.n,
                                          rep.seed),
               report_to_json(rep));
  }
  aggregate_outputs(out_dir);
}

void aggregate_outputs(const std::string& out_dir) {
  write_aggregates(read_cells(out_dir), out_dir);
}

std::vector<std::pair<std::string, double>> rank_datasets_by_leakage(const std::string& out_dir) {
  const auto cells = read_cells(out_dir);
  std::map<std::string, std::vector<double>> aucs;
  for (const CellMetrics& m : cells) {
    if (m.status == "ok" && m.worst_auc) aucs[m.dataset].push_back(*m.worst_auc);
  }
  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& [dataset, values] : aucs) {
    ranked.emplace_back(dataset, mean_of_vec(values));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return ranked;
}

}  // namespace synth_audit
