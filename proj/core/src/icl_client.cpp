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

#include "synth_audit/icl_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "httplib.h"
#include "json.hpp"

#include "synth_audit/rng.hpp"

namespace synth_audit {

namespace {

struct EndpointParts {
  std::string base;  // scheme://host[:port]
  std::string path;  // begins with '/'
};

EndpointParts split_endpoint(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("endpoint must include a scheme: " + endpoint);
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  EndpointParts parts;
  if (path_start == std::string::npos) {
    parts.base = endpoint;
    parts.path = "/";
  } else {
    parts.base = endpoint.substr(0, path_start);
    parts.path = endpoint.substr(path_start);
  }
  return parts;
}

}  // namespace

std::string to_string(ParseFailure failure) {
  switch (failure) {
    case ParseFailure::MalformedJson: return "malformed_json";
    case ParseFailure::MissingKey: return "missing_key";
    case ParseFailure::BadCsv: return "bad_csv";
    case ParseFailure::WrongColumns: return "wrong_columns";
    case ParseFailure::WrongRowCount: return "wrong_row_count";
  }
  return "unknown";
}

size_t GenerationLog::retry_count() const {
  return static_cast<size_t>(
      std::count_if(attempts.begin(), attempts.end(),
                    [](const GenerationAttempt& a) { return !a.ok; }));
}

CompletionResponse request_completion(const IclConfig& cfg, const ChatMessages& messages) {
  const char* token = std::getenv(cfg.api_key_env.c_str());
  if (token == nullptr || *token == '\0') {
    throw TransportError("missing API token: set " + cfg.api_key_env);
  }

  const EndpointParts parts = split_endpoint(cfg.endpoint);
  httplib::Client client(parts.base);
  client.set_connection_timeout(30, 0);
  client.set_read_timeout(120, 0);
  client.set_write_timeout(30, 0);
  client.set_bearer_token_auth(token);

  nlohmann::json body;
  body["model"] = cfg.model_name;
  body["temperature"] = cfg.temperature;
  body["messages"] = nlohmann::json::array({
      nlohmann::json{{"role", "system"}, {"content", messages.system_text}},
      nlohmann::json{{"role", "user"}, {"content", messages.user_text}},
  });

  const auto res = client.Post(parts.path, body.dump(), "application/json");
  if (!res) {
    throw TransportError("request to " + cfg.endpoint +
                         " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("endpoint returned status " + std::to_string(res->status));
  }

  const auto parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) {
    throw TransportError("endpoint returned unparseable JSON envelope");
  }
  CompletionResponse out;
  try {
    out.content = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw TransportError("endpoint response lacks choices[0].message.content");
  }
  if (parsed.contains("usage") && parsed["usage"].is_object()) {
    const auto& usage = parsed["usage"];
    if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number()) {
      out.prompt_tokens = usage["prompt_tokens"].get<long>();
    }
    if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number()) {
      out.completion_tokens = usage["completion_tokens"].get<long>();
    }
  }
  return out;
}

ParseOutcome parse_completion(const std::string& raw, const Table& schema_source,
                              size_t expected_rows) {
  ParseOutcome out;
  const auto parsed = nlohmann::json::parse(raw, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    out.failure = ParseFailure::MalformedJson;
    out.detail = "completion is not a JSON object";
    return out;
  }
  if (!parsed.contains("synthetic_data") || !parsed["synthetic_data"].is_string()) {
    out.failure = ParseFailure::MissingKey;
    out.detail = "no \"synthetic_data\" string in completion";
    return out;
  }

  SchemaHint hint;
  for (const ColumnSchema& col : schema_source.schema()) hint[col.name] = col.kind;

  Table table;
  try {
    table = load_table_from_string(parsed["synthetic_data"].get<std::string>(), &hint,
                                   "synthetic_data");
  } catch (const LoadError& e) {
    out.failure = ParseFailure::BadCsv;
    out.detail = e.what();
    return out;
  }

  if (table.column_count() != schema_source.column_count()) {
    out.failure = ParseFailure::WrongColumns;
    out.detail = "expected " + std::to_string(schema_source.column_count()) + " columns, got " +
                 std::to_string(table.column_count());
    return out;
  }
  for (size_t c = 0; c < table.column_count(); ++c) {
    if (table.schema(c).name != schema_source.schema(c).name) {
      out.failure = ParseFailure::WrongColumns;
      out.detail = "column " + std::to_string(c) + " is '" + table.schema(c).name +
                   "', expected '" + schema_source.schema(c).name + "'";
      return out;
    }
  }
  if (table.row_count() != expected_rows) {
    out.failure = ParseFailure::WrongRowCount;
    out.detail = "expected " + std::to_string(expected_rows) + " rows, got " +
                 std::to_string(table.row_count());
    return out;
  }
  out.table = std::move(table);
  return out;
}

IclResult icl_generate(const Table& train, size_t n_out, const IclConfig& cfg) {
  if (train.row_count() == 0) throw std::invalid_argument("icl_generate: empty train table");
  if (cfg.batch_size == 0) throw std::invalid_argument("icl_generate: batch_size must be >= 1");
  if (n_out == 0) throw std::invalid_argument("icl_generate: n_out must be >= 1");

  std::vector<std::string> column_names;
  for (const ColumnSchema& col : train.schema()) column_names.push_back(col.name);

  // Deal all train rows into batches of at most batch_size, in a
  // seed-shuffled order, so every row reaches some prompt.
  std::vector<size_t> order(train.row_count());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed_combine(cfg.seed, fnv1a("icl_batches")));
  rng.shuffle(order);
  std::vector<std::vector<size_t>> batches;
  for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const size_t end = std::min(order.size(), start + cfg.batch_size);
    batches.emplace_back(order.begin() + static_cast<ptrdiff_t>(start),
                         order.begin() + static_cast<ptrdiff_t>(end));
  }

  const std::optional<std::string> stats_block =
      cfg.include_summary_stats ? std::optional<std::string>(summary_stats(train)) : std::nullopt;

  IclResult result;
  std::optional<Table> assembled;
  size_t produced = 0;
  size_t batch_index = 0;
  while (produced < n_out) {
    const std::vector<size_t>& batch = batches[batch_index % batches.size()];
    const size_t request_rows = std::min(cfg.batch_size, n_out - produced);

    PromptSpec spec;
    spec.dataset_name = cfg.dataset_name;
    spec.column_names = column_names;
    spec.summary_stats_block = stats_block;
    spec.csv_block = to_csv_string(cfg.full_data_prompt ? train : train.select_rows(batch));
    spec.requested_rows = request_rows;
    const ChatMessages messages = build_prompt(spec);

    std::optional<Table> batch_table;
    for (size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      GenerationAttempt log;
      log.batch_index = batch_index;
      log.attempt = attempt;
      try {
        const CompletionResponse response = request_completion(cfg, messages);
        log.prompt_tokens = response.prompt_tokens;
        log.completion_tokens = response.completion_tokens;
        ParseOutcome outcome = parse_completion(response.content, train, request_rows);
        if (outcome.table) {
          log.ok = true;
          result.log.attempts.push_back(log);
          batch_table = std::move(outcome.table);
          break;
        }
        log.failure = to_string(*outcome.failure) + ": " + outcome.detail;
      } catch (const TransportError& e) {
        log.failure = std::string("transport: ") + e.what();
      }
      result.log.attempts.push_back(log);
    }
    if (!batch_table) {
      throw IclGenerationError("icl_generate: batch " + std::to_string(batch_index) +
                                   " failed after " + std::to_string(cfg.max_retries + 1) +
                                   " attempts",
                               std::move(result.log));
    }
    assembled = assembled ? concat_rows(*assembled, *batch_table) : std::move(*batch_table);
    produced += request_rows;
    ++batch_index;
  }

  result.table = std::move(*assembled);
  return result;
}

}  // namespace synth_audit
