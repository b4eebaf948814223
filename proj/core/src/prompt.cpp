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

#include "synth_audit/prompt.hpp"

#include <cstdio>

#include "synth_audit/stats.hpp"

namespace synth_audit {

namespace {

std::string sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

constexpr std::string_view kSystemText =
    "You are a tabular synthetic data generation model.\n"
    "\n"
    "Your goal is to produce data that mirrors the given examples in\n"
    "causal structure and feature/label distributions,\n"
    "while maximizing diversity.\n"
    "\n"
    "Context: Leverage your in-context learning to generate realistic,\n"
    "diverse samples.\n"
    "\n"
    "Output format: JSON.";

}  // namespace

std::string summary_stats(const Table& t) {
  std::string out;
  for (size_t c = 0; c < t.column_count(); ++c) {
    const ColumnSchema& schema = t.schema(c);
    if (schema.kind == ColumnKind::Numeric) {
      const auto& v = t.numeric(c);
      std::vector<double> sorted(v);
      std::sort(sorted.begin(), sorted.end());
      out += schema.name + ": count=" + std::to_string(v.size()) +
             ", mean=" + sig6(mean_of(v)) + ", std=" + sig6(sample_stddev(v)) +
             ", min=" + sig6(sorted.front()) + ", 25%=" + sig6(quantile_sorted(sorted, 0.25)) +
             ", 50%=" + sig6(quantile_sorted(sorted, 0.5)) +
             ", 75%=" + sig6(quantile_sorted(sorted, 0.75)) + ", max=" + sig6(sorted.back()) + "\n";
    } else {
      std::vector<size_t> counts(schema.categories.size(), 0);
      for (const int32_t code : t.codes(c)) ++counts[static_cast<size_t>(code)];
      out += schema.name + ":\n";
      for (size_t i = 0; i < schema.categories.size(); ++i) {
        out += "  " + schema.categories[i] + ": " + std::to_string(counts[i]) + "\n";
      }
    }
  }
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

ChatMessages build_prompt(const PromptSpec& spec) {
  ChatMessages msg;
  msg.system_text = std::string(kSystemText);

  std::string cols;
  for (size_t i = 0; i < spec.column_names.size(); ++i) {
    if (i) cols += ", ";
    cols += spec.column_names[i];
  }

  std::string csv = spec.csv_block;
  while (!csv.empty() && csv.back() == '\n') csv.pop_back();

  std::string user;
  user += "Dataset name: " + spec.dataset_name + "\n\n";
  user += "Column names (in order): " + cols + "\n\n";
  if (spec.summary_stats_block) {
    user += "Summary statistics:\n" + *spec.summary_stats_block + "\n\n";
  }
  user += "CSV of full data:\n" + csv + "\n\n";
  user += "Please generate " + std::to_string(spec.requested_rows) + " rows of synthetic data.\n\n";
  user += "Treat the rightmost column as the target. Return only a JSON object:\n";
  user += "{\n  \"synthetic_data\": \"<CSV string>\"\n}\n\n";
  user += "Do not include any additional text.";
  msg.user_text = std::move(user);
  return msg;
}

}  // namespace synth_audit
