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

#include <cstdlib>

#include "doctest.h"
#include "stub_endpoint.hpp"
#include "synth_audit/rng.hpp"
#include "testutil.hpp"

using namespace synth_audit;
using testutil::StubEndpoint;

namespace {

Table fixture_train(size_t rows) {
  std::vector<double> v(rows);
  std::vector<std::string> y(rows);
  for (size_t i = 0; i < rows; ++i) {
    v[i] = static_cast<double>(i) + 0.25;
    y[i] = i % 2 ? "a" : "b";
  }
  return testutil::make_table({{"v", v}, {"y", y}});
}

std::string valid_payload(size_t rows, double offset = 0.0) {
  return testutil::completion_payload_for(fixture_train(2), rows, offset);
}

IclConfig fixture_config(const StubEndpoint& stub) {
  IclConfig cfg;
  cfg.endpoint = stub.endpoint();
  cfg.model_name = "stub-model";
  cfg.dataset_name = "fixture";
  cfg.batch_size = 8;
  cfg.max_retries = 5;
  setenv("SYNTH_AUDIT_API_KEY", "test-token", 1);
  return cfg;
}

}  // namespace

TEST_CASE("parse_completion: shapes and failure taxonomy") {
  const Table schema = fixture_train(4);

  const ParseOutcome ok = parse_completion(valid_payload(4), schema, 4);
  REQUIRE(ok.table.has_value());
  CHECK(ok.table->row_count() == 4);
  CHECK(ok.table->schema(0).name == "v");

  const ParseOutcome prose = parse_completion("Sure! Here you go: {}", schema, 4);
  CHECK(prose.failure == ParseFailure::MalformedJson);

  const ParseOutcome missing = parse_completion(R"({"data": "v,y\n1,a\n"})", schema, 1);
  CHECK(missing.failure == ParseFailure::MissingKey);

  const ParseOutcome bad_csv = parse_completion(R"({"synthetic_data": "v,y\nnotnum,a\n"})",
                                                schema, 1);
  CHECK(bad_csv.failure == ParseFailure::BadCsv);

  const ParseOutcome wrong_cols = parse_completion(R"({"synthetic_data": "y,v\na,1\n"})",
                                                   schema, 1);
  CHECK(wrong_cols.failure == ParseFailure::WrongColumns);

  const ParseOutcome short_rows = parse_completion(valid_payload(9), schema, 10);
  CHECK(short_rows.failure == ParseFailure::WrongRowCount);
}

TEST_CASE("request_completion: token, status and envelope errors") {
  StubEndpoint stub([](size_t, size_t rows) { return valid_payload(rows); });
  IclConfig cfg = fixture_config(stub);

  unsetenv("SYNTH_AUDIT_API_KEY");
  CHECK_THROWS_AS(request_completion(cfg, ChatMessages{"s", "u"}), TransportError);
  setenv("SYNTH_AUDIT_API_KEY", "test-token", 1);

  IclConfig bad = cfg;
  bad.endpoint = "http://127.0.0.1:1/v1/chat/completions";  // nothing listens here
  CHECK_THROWS_AS(request_completion(bad, ChatMessages{"s", "u"}), TransportError);

  const CompletionResponse res =
      request_completion(cfg, ChatMessages{"sys", "Please generate 3 rows"});
  CHECK(res.prompt_tokens == 100);
  CHECK(res.completion_tokens == 50);
  CHECK(!res.content.empty());
}

TEST_CASE("icl_generate: clean run with zero retries") {
  StubEndpoint stub([](size_t, size_t rows) { return valid_payload(rows); });
  const IclConfig cfg = fixture_config(stub);
  const Table train = fixture_train(16);

  const IclResult result = icl_generate(train, 16, cfg);
  CHECK(result.table.row_count() == 16);
  CHECK(result.table.schema_compatible(train));
  CHECK(result.log.retry_count() == 0);
  CHECK(result.log.request_count() == 2);  // 16 rows at batch 8
  CHECK(stub.hits() == 2);
  for (const GenerationAttempt& a : result.log.attempts) {
    CHECK(a.ok);
    CHECK(a.prompt_tokens == 100);
  }
}

TEST_CASE("icl_generate: two failures then success logs exactly two retries") {
  StubEndpoint stub([](size_t ordinal, size_t rows) {
    return ordinal < 2 ? std::string("not json at all") : valid_payload(rows);
  });
  const IclConfig cfg = fixture_config(stub);
  const Table train = fixture_train(8);

  const IclResult result = icl_generate(train, 8, cfg);
  CHECK(result.table.row_count() == 8);
  CHECK(result.log.retry_count() == 2);
  CHECK(result.log.request_count() == 3);
  CHECK(!result.log.attempts[0].ok);
  CHECK(result.log.attempts[0].failure.find("malformed_json") != std::string::npos);
  CHECK(result.log.attempts[2].ok);
}

TEST_CASE("icl_generate: persistent failure errors after max_retries+1 attempts") {
  StubEndpoint stub([](size_t, size_t) { return std::string("garbage"); });
  IclConfig cfg = fixture_config(stub);
  cfg.max_retries = 3;
  const Table train = fixture_train(8);

  try {
    icl_generate(train, 8, cfg);
    FAIL("expected IclGenerationError");
  } catch (const IclGenerationError& e) {
    CHECK(e.log.request_count() == 4);  // max_retries + 1
    CHECK(e.log.retry_count() == 4);
    CHECK(stub.hits() == 4);
  }
}

TEST_CASE("icl_generate: 20 rows at batch 8 issues 3 requests of 8, 8 and 4") {
  std::vector<size_t> seen;
  StubEndpoint stub([&seen](size_t, size_t rows) {
    seen.push_back(rows);
    return valid_payload(rows);
  });
  const IclConfig cfg = fixture_config(stub);
  const Table train = fixture_train(20);

  const IclResult result = icl_generate(train, 20, cfg);
  CHECK(result.table.row_count() == 20);
  CHECK(stub.hits() == 3);
  CHECK(seen == std::vector<size_t>{8, 8, 4});
}

TEST_CASE("icl_generate: deterministic against a deterministic stub") {
  const auto script = [](size_t ordinal, size_t rows) {
    return valid_payload(rows, static_cast<double>(ordinal) * 0.001);
  };
  const Table train = fixture_train(12);
  IclResult a = [&] {
    StubEndpoint stub(script);
    IclConfig cfg = fixture_config(stub);
    cfg.seed = 77;
    return icl_generate(train, 12, cfg);
  }();
  IclResult b = [&] {
    StubEndpoint stub(script);
    IclConfig cfg = fixture_config(stub);
    cfg.seed = 77;
    return icl_generate(train, 12, cfg);
  }();
  CHECK(a.table.numeric(0) == b.table.numeric(0));
  CHECK(a.table.codes(1) == b.table.codes(1));
}

TEST_CASE("icl_generate: full-data prompts carry every train row") {
  StubEndpoint stub([](size_t, size_t rows) { return valid_payload(rows); });
  IclConfig cfg = fixture_config(stub);
  cfg.full_data_prompt = true;
  cfg.batch_size = 4;
  const Table train = fixture_train(8);
  const IclResult result = icl_generate(train, 8, cfg);
  CHECK(result.table.row_count() == 8);
  CHECK(stub.hits() == 2);
  // Every train row's value appears in the prompt CSV.
  const std::string user = stub.last_user();
  for (size_t r = 0; r < train.row_count(); ++r) {
    CHECK(user.find(train.cell_text(r, 0)) != std::string::npos);
  }
}
