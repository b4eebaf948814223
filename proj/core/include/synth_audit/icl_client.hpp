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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "synth_audit/prompt.hpp"
#include "synth_audit/table.hpp"

namespace synth_audit {

struct IclConfig {
  std::string endpoint;    // e.g. http://127.0.0.1:8080/v1/chat/completions
  std::string model_name;
  std::string dataset_name = "dataset";
  double temperature = 1.0;
  size_t batch_size = 32;
  bool include_summary_stats = true;
  size_t max_retries = 5;
  uint64_t seed = 0;
  // Carry the whole train split in every request instead of just the
  // batch's rows.
  bool full_data_prompt = false;
  std::string api_key_env = "SYNTH_AUDIT_API_KEY";
};

// Network/HTTP-level failure; always retryable.
class TransportError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CompletionResponse {
  std::string content;
  long prompt_tokens = -1;      // -1 when the endpoint reports no usage
  long completion_tokens = -1;
};

// POSTs a chat-completion JSON body {model, temperature, messages} and
// returns the first choice's message content. Bearer token read from
// cfg.api_key_env; a missing token is a TransportError.
CompletionResponse request_completion(const IclConfig& cfg, const ChatMessages& messages);

enum class ParseFailure { MalformedJson, MissingKey, BadCsv, WrongColumns, WrongRowCount };
std::string to_string(ParseFailure failure);

struct ParseOutcome {
  std::optional<Table> table;
  std::optional<ParseFailure> failure;
  std::string detail;
};

// Validates a completion against the expected shape: JSON object with a
// "synthetic_data" CSV string, the schema's column names in order, kinds
// enforced from schema_source, and exactly expected_rows rows.
ParseOutcome parse_completion(const std::string& raw, const Table& schema_source,
                              size_t expected_rows);

struct GenerationAttempt {
  size_t batch_index = 0;
  size_t attempt = 0;  // 0 = first try
  bool ok = false;
  std::string failure;
  long prompt_tokens = -1;
  long completion_tokens = -1;
};

struct GenerationLog {
  std::vector<GenerationAttempt> attempts;
  size_t retry_count() const;
  size_t request_count() const { return attempts.size(); }
};

class IclGenerationError : public std::runtime_error {
 public:
  IclGenerationError(const std::string& what, GenerationLog log)
      : std::runtime_error(what), log(std::move(log)) {}
  GenerationLog log;
};

struct IclResult {
  Table table;
  GenerationLog log;
};

// Batched generation: the train rows are dealt into request batches of at
// most batch_size rows (every row appears in some prompt), each batch is
// requested and parsed with up to max_retries retries on any transport or
// parse failure, and valid outputs are concatenated until n_out rows exist.
IclResult icl_generate(const Table& train, size_t n_out, const IclConfig& cfg);

}  // namespace synth_audit
