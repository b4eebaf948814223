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
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace synth_audit {

class LoadError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ColumnKind { Numeric, Categorical };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  // Categorical only; labels are unique, in first-appearance order.
  std::vector<std::string> categories;
};

// Numeric columns hold finite doubles, categorical columns hold indices into
// the schema's category list.
using Column = std::variant<std::vector<double>, std::vector<int32_t>>;

// Immutable after construction; the rightmost column is the target.
class Table {
 public:
  Table() = default;
  Table(std::vector<ColumnSchema> schema, std::vector<Column> columns);

  size_t row_count() const { return row_count_; }
  size_t column_count() const { return schema_.size(); }
  size_t target_column() const;

  const std::vector<ColumnSchema>& schema() const { return schema_; }
  const ColumnSchema& schema(size_t col) const { return schema_.at(col); }

  bool is_numeric(size_t col) const { return schema_.at(col).kind == ColumnKind::Numeric; }
  const std::vector<double>& numeric(size_t col) const;
  const std::vector<int32_t>& codes(size_t col) const;
  const std::string& category_label(size_t col, int32_t code) const;

  // Cell rendered as text: numeric cells use the shortest round-trip form.
  std::string cell_text(size_t row, size_t col) const;

  Table select_rows(std::span<const size_t> rows) const;

  // True when names and kinds match position by position (categories may
  // differ; encoders match categorical values by label).
  bool schema_compatible(const Table& other) const;

  std::optional<size_t> column_index(std::string_view name) const;

 private:
  std::vector<ColumnSchema> schema_;
  std::vector<Column> columns_;
  size_t row_count_ = 0;
};

// Row-concatenation; schemas must be compatible. Category code spaces are
// merged by label, with labels new to `a` appended in `b`'s order.
Table concat_rows(const Table& a, const Table& b);

using SchemaHint = std::map<std::string, ColumnKind>;

// Reads the hint format {"column": "numeric" | "categorical"}.
SchemaHint load_schema_hint(const std::string& path);
SchemaHint parse_schema_hint(const std::string& json_text);

// CSV ingestion: UTF-8, comma-separated, RFC 4180 quoting, header row
// mandatory. Without a hint a column is Categorical iff any cell fails
// numeric parsing or it has <= 20 distinct all-integer values. Empty cells,
// ragged rows and empty tables are load errors.
Table load_table(const std::string& path, const SchemaHint* hint = nullptr);
Table load_table_from_string(const std::string& text, const SchemaHint* hint = nullptr,
                             const std::string& origin = "<string>");

std::string to_csv_string(const Table& t);
void write_csv(const Table& t, const std::string& path);

std::string_view to_string(ColumnKind kind);

}  // namespace synth_audit
