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

#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "testutil.hpp"

using namespace synth_audit;

namespace {

const Table& fixture_table() {
  static const Table t = load_table_from_string(
      "age,bmi,label\n"
      "63,27.1,pos\n"
      "44,22.4,neg\n"
      "51,31.9,pos\n");
  return t;
}

PromptSpec fixture_spec(bool with_stats) {
  const Table& t = fixture_table();
  PromptSpec spec;
  spec.dataset_name = "toy_health";
  for (const ColumnSchema& c : t.schema()) spec.column_names.push_back(c.name);
  if (with_stats) spec.summary_stats_block = summary_stats(t);
  spec.csv_block = to_csv_string(t);
  spec.requested_rows = 10;
  return spec;
}

std::filesystem::path golden_path(const std::string& name) {
  return std::filesystem::path(SYNTH_AUDIT_TEST_DATA_DIR) / "goldens" / name;
}

// Compares against a checked-in golden; SYNTH_AUDIT_WRITE_GOLDENS=1
// regenerates the files instead.
void check_golden(const std::string& name, const std::string& actual) {
  const auto path = golden_path(name);
  if (const char* write = std::getenv("SYNTH_AUDIT_WRITE_GOLDENS"); write && *write == '1') {
    testutil::write_file(path, actual);
    return;
  }
  INFO("golden file: ", path.string());
  REQUIRE(std::filesystem::exists(path));
  CHECK(actual == testutil::read_file(path));
}

}  // namespace

TEST_CASE("summary_stats: hand-checkable numbers and per-category lines") {
  const Table t = testutil::make_table(
      {{"v", std::vector<double>{1, 2, 3}},
       {"c", std::vector<std::string>{"A", "A", "B"}}});
  const std::string block = summary_stats(t);
  CHECK(block.find("mean=2") != std::string::npos);
  CHECK(block.find("50%=2") != std::string::npos);
  CHECK(block.find("  A: 2") != std::string::npos);
  CHECK(block.find("  B: 1") != std::string::npos);
}

TEST_CASE("summary_stats: golden fixture") {
  check_golden("summary_stats.txt", summary_stats(fixture_table()));
}

TEST_CASE("build_prompt: system text carries the fixed system line verbatim") {
  const ChatMessages msg = build_prompt(fixture_spec(true));
  CHECK(msg.system_text.find("You are a tabular synthetic data generation model.") == 0);
}

TEST_CASE("build_prompt: user text structure and the stats toggle") {
  const ChatMessages with_stats = build_prompt(fixture_spec(true));
  CHECK(with_stats.user_text.find("Dataset name: toy_health") != std::string::npos);
  CHECK(with_stats.user_text.find("Column names (in order): age, bmi, label") !=
        std::string::npos);
  CHECK(with_stats.user_text.find("Summary statistics:") != std::string::npos);
  CHECK(with_stats.user_text.find("CSV of full data:") != std::string::npos);
  CHECK(with_stats.user_text.find("Please generate 10 rows of synthetic data.") !=
        std::string::npos);
  CHECK(with_stats.user_text.find("\"synthetic_data\"") != std::string::npos);
  CHECK(with_stats.user_text.find("Treat the rightmost column as the target.") !=
        std::string::npos);

  const ChatMessages without = build_prompt(fixture_spec(false));
  CHECK(without.user_text.find("Summary statistics:") == std::string::npos);
  CHECK(without.system_text == with_stats.system_text);

  PromptSpec three = fixture_spec(true);
  three.requested_rows = 3;
  CHECK(build_prompt(three).user_text.find("Please generate 3 rows of synthetic data.") !=
        std::string::npos);
}

TEST_CASE("build_prompt: goldens are byte-exact") {
  check_golden("prompt_system.txt", build_prompt(fixture_spec(true)).system_text);
  check_golden("prompt_user_default.txt", build_prompt(fixture_spec(true)).user_text);
  check_golden("prompt_user_nostats.txt", build_prompt(fixture_spec(false)).user_text);
}

TEST_CASE("build_prompt: distinct seed batches make distinct prompts") {
  PromptSpec a = fixture_spec(true);
  PromptSpec b = a;
  b.csv_block = "age,bmi,label\n1,2,neg\n";
  CHECK(build_prompt(a).user_text != build_prompt(b).user_text);
}
