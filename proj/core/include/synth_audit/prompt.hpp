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

#include <optional>
#include <string>
#include <vector>

#include "synth_audit/table.hpp"

namespace synth_audit {

// Per-column text block for the prompt: numeric columns get
// count/mean/std/min/quartiles/max at 6 significant digits, categorical
// columns get one count line per category, in column order.
std::string summary_stats(const Table& t);

struct PromptSpec {
  std::string dataset_name;
  std::vector<std::string> column_names;           // schema order
  std::optional<std::string> summary_stats_block;  // omitted entirely when absent
  std::string csv_block;                           // header + seed rows
  size_t requested_rows = 0;
};

struct ChatMessages {
  std::string system_text;
  std::string user_text;
};

// Renders the generation prompt: fixed system text plus a user message with
// dataset name, column order, optional summary statistics, the seed-row CSV,
// the row request, the target-column instruction and the JSON-only output
// contract keyed "synthetic_data".
ChatMessages build_prompt(const PromptSpec& spec);

}  // namespace synth_audit
