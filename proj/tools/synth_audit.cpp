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

// synth_audit: privacy/fidelity/utility auditing of synthetic tabular data.
//
//   split      materialize audit cells (train/holdout/reference CSVs)
//   generate   run a bundled generator (smote, marginal, icl) to CSV
//   audit      audit one train/holdout/synth triple of CSV files
//   bench      run the full dataset x size x seed x generator matrix
//   factorial  prompt-knob factorial study (Table-3-shaped report)
//   report     re-aggregate CSVs from emitted per-cell JSONs

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "synth_audit/bench.hpp"
#include "synth_audit/generators.hpp"
#include "synth_audit/icl_client.hpp"
#include "synth_audit/protocol.hpp"
#include "synth_audit/rng.hpp"
#include "synth_audit/table.hpp"

namespace fs = std::filesystem;
using namespace synth_audit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartialFailure = 1;
constexpr int kExitConfigError = 2;

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  size_t jobs = 1;
  std::string attacks_csv;
  bool resume = false;
};

std::vector<AttackSpec> parse_attack_list(const std::string& csv) {
  if (csv.empty()) return default_attack_roster();
  std::vector<AttackSpec> specs;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto name = attack_from_string(item);
    if (!name) throw ConfigError("unknown attack '" + item + "'");
    specs.push_back(make_attack_spec(*name));
  }
  if (specs.empty()) throw ConfigError("empty attack list");
  return specs;
}

Table load_prepared(const std::string& path, const std::string& hint_path, size_t bins,
                    std::vector<std::string>* warnings) {
  SchemaHint hint;
  const SchemaHint* hint_ptr = nullptr;
  if (!hint_path.empty()) {
    hint = load_schema_hint(hint_path);
    hint_ptr = &hint;
  }
  Table t = load_table(path, hint_ptr);
  if (t.is_numeric(t.target_column())) {
    t = discretize_target(t, bins);
    if (warnings) warnings->push_back(path + ": numeric target discretized into quantile bins");
  }
  return t;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_split(const GlobalOpts& global, const std::string& data, const std::string& hint,
              const std::string& id, std::vector<size_t> sizes, std::vector<uint64_t> seeds,
              double test_frac, size_t bins) {
  std::vector<std::string> warnings;
  const Table t = load_prepared(data, hint, bins, &warnings);
  const std::string dataset_id = id.empty() ? fs::path(data).stem().string() : id;
  if (sizes.empty()) sizes.assign(kDefaultSubsetSizes.begin(), kDefaultSubsetSizes.end());
  if (seeds.empty()) seeds.assign(kDefaultSeeds.begin(), kDefaultSeeds.end());

  const auto cells = make_cells(t, dataset_id, sizes, seeds, test_frac, global.seed, &warnings);
  print_warnings(warnings);
  if (cells.empty()) {
    std::cerr << "error: no cells could be materialized\n";
    return kExitConfigError;
  }

  const fs::path out(global.out_dir.empty() ? "cells_out" : global.out_dir);
  fs::create_directories(out);
  nlohmann::ordered_json manifest;
  manifest["dataset_id"] = dataset_id;
  manifest["split_seed"] = global.seed;
  manifest["test_frac"] = test_frac;
  manifest["cells"] = nlohmann::ordered_json::array();
  for (const AuditCell& cell : cells) {
    const std::string stem = dataset_id + "_n" + std::to_string(cell.n) + "_s" +
                             std::to_string(cell.seed);
    write_csv(t.select_rows(cell.train_idx), (out / (stem + "_train.csv")).string());
    write_csv(t.select_rows(cell.holdout_idx), (out / (stem + "_holdout.csv")).string());
    if (!cell.reference_idx.empty()) {
      write_csv(t.select_rows(cell.reference_idx), (out / (stem + "_reference.csv")).string());
    }
    manifest["cells"].push_back(nlohmann::ordered_json{{"stem", stem},
                                                       {"n", cell.n},
                                                       {"seed", cell.seed},
                                                       {"train_idx", cell.train_idx},
                                                       {"holdout_idx", cell.holdout_idx},
                                                       {"reference_idx", cell.reference_idx}});
  }
  {
    std::ofstream mf(out / "cells.json", std::ios::binary);
    mf << manifest.dump(1);
  }
  std::cout << "materialized " << cells.size() << " cells under " << out.string() << "\n";
  return kExitOk;
}

int cmd_generate(const GlobalOpts& global, const std::string& data, const std::string& hint,
                 const std::string& generator, size_t n_out, const std::string& out_file,
                 const SmoteConfig& smote_cfg, IclConfig icl_cfg, size_t bins) {
  std::vector<std::string> warnings;
  const Table train = load_prepared(data, hint, bins, &warnings);
  const size_t rows = n_out == 0 ? train.row_count() : n_out;

  Table synth;
  if (generator == "smote") {
    SmoteConfig cfg = smote_cfg;
    cfg.seed = global.seed;
    synth = smote_generate(train, rows, cfg, &warnings);
  } else if (generator == "marginal") {
    synth = marginal_generate(train, rows, global.seed);
  } else if (generator == "icl") {
    if (icl_cfg.endpoint.empty() || icl_cfg.model_name.empty()) {
      std::cerr << "error: icl generation needs --endpoint and --model\n";
      return kExitConfigError;
    }
    icl_cfg.seed = global.seed;
    icl_cfg.dataset_name = fs::path(data).stem().string();
    try {
      IclResult result = icl_generate(train, rows, icl_cfg);
      synth = std::move(result.table);
      std::cerr << "icl: " << result.log.request_count() << " requests, "
                << result.log.retry_count() << " retries\n";
    } catch (const IclGenerationError& e) {
      std::cerr << "error: " << e.what() << "\n";
      for (const GenerationAttempt& a : e.log.attempts) {
        std::cerr << "  batch " << a.batch_index << " attempt " << a.attempt << ": "
                  << (a.ok ? "ok" : a.failure) << "\n";
      }
      return kExitPartialFailure;
    }
  } else {
    std::cerr << "error: unknown generator '" << generator << "'\n";
    return kExitConfigError;
  }
  print_warnings(warnings);
  write_csv(synth, out_file);
  std::cout << "wrote " << synth.row_count() << " rows to " << out_file << "\n";
  return kExitOk;
}

int cmd_audit(const GlobalOpts& global, const std::string& train_path,
              const std::string& holdout_path, const std::string& synth_path,
              const std::string& reference_path, const std::string& hint_path,
              const std::string& out_file) {
  SchemaHint hint;
  const SchemaHint* hint_ptr = nullptr;
  if (!hint_path.empty()) {
    hint = load_schema_hint(hint_path);
    hint_ptr = &hint;
  }
  const Table train = load_table(train_path, hint_ptr);

  SchemaHint derived;
  for (const ColumnSchema& col : train.schema()) derived[col.name] = col.kind;
  const Table holdout = load_table(holdout_path, &derived);
  const Table synth = load_table(synth_path, &derived);
  std::optional<Table> reference;
  if (!reference_path.empty()) reference = load_table(reference_path, &derived);

  AuditReport rep =
      audit_synthetic(train, holdout, reference ? &*reference : nullptr, synth,
                      parse_attack_list(global.attacks_csv), global.seed);
  rep.dataset_id = fs::path(train_path).stem().string();
  rep.generator_id = fs::path(synth_path).stem().string();
  rep.n = train.row_count();
  rep.seed = global.seed;

  const std::string json = report_to_json(rep);
  if (out_file.empty() || out_file == "-") {
    std::cout << json << "\n";
  } else {
    std::ofstream out(out_file, std::ios::binary);
    out << json;
    std::cout << "wrote " << out_file << "\n";
  }
  const bool leakage_ok = rep.leakage.has_value();
  return leakage_ok ? kExitOk : kExitPartialFailure;
}

int cmd_bench(const GlobalOpts& global) {
  if (global.config_path.empty()) {
    std::cerr << "error: bench needs --config <path>\n";
    return kExitConfigError;
  }
  BenchConfig cfg = load_bench_config(global.config_path);
  if (!global.out_dir.empty()) cfg.out_dir = global.out_dir;
  if (cfg.out_dir.empty()) cfg.out_dir = "bench_out";
  if (global.jobs > 1) cfg.jobs = global.jobs;
  if (!global.attacks_csv.empty()) cfg.attacks = parse_attack_list(global.attacks_csv);
  if (global.resume) cfg.resume = true;

  const BenchResult result = run_benchmark(cfg);
  print_warnings(result.warnings);
  emit_outputs(result.reports, cfg.out_dir);
  std::cout << "cells: " << result.reports.size() << " (" << result.failed_cells
            << " failed); outputs under " << cfg.out_dir << "\n";
  return result.failed_cells == 0 ? kExitOk : kExitPartialFailure;
}

int cmd_factorial(const GlobalOpts& global, const std::string& generator_id, size_t top_k,
                  const std::string& prior_dir) {
  if (global.config_path.empty()) {
    std::cerr << "error: factorial needs --config <path>\n";
    return kExitConfigError;
  }
  BenchConfig cfg = load_bench_config(global.config_path);
  if (!global.out_dir.empty()) cfg.out_dir = global.out_dir;
  if (cfg.out_dir.empty()) cfg.out_dir = "factorial_out";
  if (global.jobs > 1) cfg.jobs = global.jobs;
  if (!global.attacks_csv.empty()) cfg.attacks = parse_attack_list(global.attacks_csv);
  if (global.resume) cfg.resume = true;

  // Pick the generator whose prompt knobs the arms vary.
  const GeneratorSpec* base = nullptr;
  for (const GeneratorSpec& gen : cfg.generators) {
    if (generator_id.empty() ? gen.type == GeneratorSpec::Type::Icl : gen.id == generator_id) {
      base = &gen;
      break;
    }
  }
  if (base == nullptr && generator_id.empty() && !cfg.generators.empty()) {
    base = &cfg.generators.front();
  }
  if (base == nullptr) {
    std::cerr << "error: generator '" << generator_id << "' not found in config\n";
    return kExitConfigError;
  }

  if (top_k > 0) {
    if (prior_dir.empty()) {
      std::cerr << "error: --top-k-leaky needs --prior <dir> with a previous run\n";
      return kExitConfigError;
    }
    const auto ranked = rank_datasets_by_leakage(prior_dir);
    std::vector<DatasetSpec> selected;
    for (const auto& [dataset, auc] : ranked) {
      if (selected.size() >= top_k) break;
      for (const DatasetSpec& spec : cfg.datasets) {
        if (spec.id == dataset) selected.push_back(spec);
      }
    }
    if (selected.empty()) {
      std::cerr << "error: no config datasets matched the prior ranking\n";
      return kExitConfigError;
    }
    cfg.datasets = std::move(selected);
  }

  const auto arms = default_factorial_arms();
  const BenchResult result = run_factorial(cfg, *base, arms);
  print_warnings(result.warnings);
  emit_outputs(result.reports, cfg.out_dir);
  std::cout << "factorial cells: " << result.reports.size() << " (" << result.failed_cells
            << " failed); outputs under " << cfg.out_dir << "\n";
  return result.failed_cells == 0 ? kExitOk : kExitPartialFailure;
}

int cmd_report(const GlobalOpts& global, const std::string& dir) {
  const std::string target = dir.empty() ? global.out_dir : dir;
  if (target.empty()) {
    std::cerr << "error: report needs --out <dir> (or positional dir)\n";
    return kExitConfigError;
  }
  aggregate_outputs(target);
  std::cout << "re-aggregated CSVs under " << target << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic tabular data privacy benchmark"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts global;
  app.add_option("--config", global.config_path, "benchmark config JSON");
  app.add_option("--out", global.out_dir, "output directory");
  app.add_option("--seed", global.seed, "base random seed");
  app.add_option("--jobs", global.jobs, "parallel worker count");
  app.add_option("--attacks", global.attacks_csv, "comma-separated attack list");
  app.add_flag("--resume", global.resume, "skip cells whose output JSON already exists");

  // split
  auto* split = app.add_subcommand("split", "materialize audit cells as CSV files");
  std::string split_data, split_hint, split_id;
  std::vector<size_t> split_sizes;
  std::vector<uint64_t> split_seeds;
  double split_frac = kDefaultTestFrac;
  size_t split_bins = 4;
  split->add_option("--data", split_data, "real table CSV")->required();
  split->add_option("--schema", split_hint, "schema hint JSON");
  split->add_option("--id", split_id, "dataset id (default: file stem)");
  split->add_option("--sizes", split_sizes, "subset sizes");
  split->add_option("--seeds", split_seeds, "subsample seeds");
  split->add_option("--test-frac", split_frac, "holdout fraction");
  split->add_option("--bins", split_bins, "quantile bins for numeric targets");

  // generate
  auto* generate = app.add_subcommand("generate", "run a bundled generator to CSV");
  std::string gen_data, gen_hint, gen_kind = "smote", gen_out = "synthetic.csv";
  size_t gen_n = 0, gen_bins = 4;
  SmoteConfig gen_smote;
  IclConfig gen_icl;
  generate->add_option("--data", gen_data, "training rows CSV")->required();
  generate->add_option("--schema", gen_hint, "schema hint JSON");
  generate->add_option("--generator", gen_kind, "smote | marginal | icl");
  generate->add_option("--n", gen_n, "rows to generate (default: train size)");
  generate->add_option("--out-file", gen_out, "output CSV path");
  generate->add_option("--bins", gen_bins, "quantile bins for numeric targets");
  generate->add_option("--k", gen_smote.k, "smote neighbor count");
  generate->add_option("--alpha", gen_smote.alpha, "smote interpolation cap");
  generate->add_option("--endpoint", gen_icl.endpoint, "chat-completion endpoint URL");
  generate->add_option("--model", gen_icl.model_name, "model name");
  generate->add_option("--temperature", gen_icl.temperature, "sampling temperature");
  generate->add_option("--batch-size", gen_icl.batch_size, "seed rows per request");
  generate->add_flag("!--no-summary-stats", gen_icl.include_summary_stats,
                     "omit summary statistics from prompts");
  generate->add_option("--max-retries", gen_icl.max_retries, "retries per batch");

  // audit
  auto* audit = app.add_subcommand("audit", "audit one train/holdout/synth triple");
  std::string audit_train, audit_holdout, audit_synth, audit_reference, audit_hint, audit_out;
  audit->add_option("--train", audit_train, "train rows CSV")->required();
  audit->add_option("--holdout", audit_holdout, "holdout rows CSV")->required();
  audit->add_option("--synth", audit_synth, "synthetic rows CSV")->required();
  audit->add_option("--reference", audit_reference, "reference rows CSV (shadow-box attacks)");
  audit->add_option("--schema", audit_hint, "schema hint JSON");
  audit->add_option("--report", audit_out, "report path ('-' = stdout)");

  // bench
  app.add_subcommand("bench", "run the full benchmark matrix from --config");

  // factorial
  auto* factorial = app.add_subcommand("factorial", "prompt-knob factorial study");
  std::string fact_generator, fact_prior;
  size_t fact_top_k = 0;
  factorial->add_option("--generator", fact_generator, "config generator id to vary");
  factorial->add_option("--top-k-leaky", fact_top_k,
                        "restrict to the k leakiest datasets of a prior run");
  factorial->add_option("--prior", fact_prior, "prior run output dir for --top-k-leaky");

  // report
  auto* report = app.add_subcommand("report", "re-aggregate CSVs from per-cell JSONs");
  std::string report_dir;
  report->add_option("dir", report_dir, "output directory of a previous run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (split->parsed()) {
      return cmd_split(global, split_data, split_hint, split_id, split_sizes, split_seeds,
                       split_frac, split_bins);
    }
    if (generate->parsed()) {
      return cmd_generate(global, gen_data, gen_hint, gen_kind, gen_n, gen_out, gen_smote,
                          gen_icl, gen_bins);
    }
    if (audit->parsed()) {
      return cmd_audit(global, audit_train, audit_holdout, audit_synth, audit_reference,
                       audit_hint, audit_out);
    }
    if (app.get_subcommand("bench")->parsed()) {
      return cmd_bench(global);
    }
    if (factorial->parsed()) {
      return cmd_factorial(global, fact_generator, fact_top_k, fact_prior);
    }
    if (report->parsed()) {
      return cmd_report(global, report_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const LoadError& e) {
    std::cerr << "load error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartialFailure;
  }
  return kExitConfigError;
}
