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

#include "synth_audit/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace synth_audit {

namespace {

std::string_view trim_ascii(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t'; };
  size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

// Full-token finite parse; leading/trailing blanks tolerated for numeric
// interpretation only, category labels keep the raw text.
std::optional<double> parse_numeric(std::string_view raw) {
  const std::string_view s = trim_ascii(raw);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_csv_field(std::string& out, std::string_view field) {
  if (!needs_quoting(field)) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

struct RawRows {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180 state machine: quoted fields may contain commas, escaped quotes
// ("") and line breaks. CRLF and LF record separators both accepted.
RawRows parse_csv(std::string_view text, const std::string& origin) {
  RawRows out;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;
  size_t line = 1;

  const auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  const auto end_record = [&] {
    end_field();
    if (out.header.empty()) {
      out.header = std::move(record);
    } else {
      out.rows.push_back(std::move(record));
    }
    record.clear();
    record_has_content = false;
  };

  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !field_was_quoted) {
          in_quotes = true;
          field_was_quoted = true;
          record_has_content = true;
        } else {
          // Stray quote inside an unquoted field; keep it literal.
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;  // swallowed with the \n
        [[fallthrough]];
      case '\n':
        ++line;
        if (record_has_content || !field.empty() || !record.empty() || field_was_quoted) {
          end_record();
        }
        break;
      default:
        field.push_back(c);
        record_has_content = true;
        break;
    }
  }
  if (in_quotes) {
    throw LoadError(origin + ": unterminated quoted field (line " + std::to_string(line) + ")");
  }
  if (record_has_content || !record.empty() || !field.empty()) {
    end_record();
  }
  return out;
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::Numeric ? "numeric" : "categorical";
}

Table::Table(std::vector<ColumnSchema> schema, std::vector<Column> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  if (schema_.size() != columns_.size()) {
    throw std::invalid_argument("Table: schema/column count mismatch");
  }
  if (schema_.empty()) {
    throw std::invalid_argument("Table: at least one column required");
  }
  row_count_ = std::visit([](const auto& v) { return v.size(); }, columns_[0]);
  for (size_t c = 0; c < columns_.size(); ++c) {
    const size_t len = std::visit([](const auto& v) { return v.size(); }, columns_[c]);
    if (len != row_count_) {
      throw std::invalid_argument("Table: column '" + schema_[c].name + "' has length " +
                                  std::to_string(len) + ", expected " + std::to_string(row_count_));
    }
    const bool holds_numeric = std::holds_alternative<std::vector<double>>(columns_[c]);
    if (holds_numeric != (schema_[c].kind == ColumnKind::Numeric)) {
      throw std::invalid_argument("Table: column '" + schema_[c].name + "' storage does not match kind");
    }
    if (schema_[c].kind == ColumnKind::Categorical) {
      std::unordered_set<std::string_view> seen;
      for (const auto& label : schema_[c].categories) {
        if (!seen.insert(label).second) {
          throw std::invalid_argument("Table: duplicate category label '" + label + "' in column '" +
                                      schema_[c].name + "'");
        }
      }
      const auto n_cat = static_cast<int32_t>(schema_[c].categories.size());
      for (const int32_t code : std::get<std::vector<int32_t>>(columns_[c])) {
        if (code < 0 || code >= n_cat) {
          throw std::invalid_argument("Table: out-of-range category code in column '" +
                                      schema_[c].name + "'");
        }
      }
    } else {
      if (!schema_[c].categories.empty()) {
        throw std::invalid_argument("Table: numeric column '" + schema_[c].name +
                                    "' must not carry categories");
      }
      for (const double v : std::get<std::vector<double>>(columns_[c])) {
        if (!std::isfinite(v)) {
          throw std::invalid_argument("Table: non-finite value in numeric column '" +
                                      schema_[c].name + "'");
        }
      }
    }
  }
}

size_t Table::target_column() const {
  if (schema_.empty()) throw std::logic_error("Table::target_column on empty table");
  return schema_.size() - 1;
}

const std::vector<double>& Table::numeric(size_t col) const {
  if (!is_numeric(col)) {
    throw std::invalid_argument("Table: column '" + schema_.at(col).name + "' is not numeric");
  }
  return std::get<std::vector<double>>(columns_[col]);
}

const std::vector<int32_t>& Table::codes(size_t col) const {
  if (is_numeric(col)) {
    throw std::invalid_argument("Table: column '" + schema_.at(col).name + "' is not categorical");
  }
  return std::get<std::vector<int32_t>>(columns_[col]);
}

const std::string& Table::category_label(size_t col, int32_t code) const {
  const auto& cats = schema_.at(col).categories;
  if (code < 0 || static_cast<size_t>(code) >= cats.size()) {
    throw std::out_of_range("Table: category code out of range in column '" + schema_[col].name + "'");
  }
  return cats[static_cast<size_t>(code)];
}

std::string Table::cell_text(size_t row, size_t col) const {
  if (row >= row_count_) throw std::out_of_range("Table::cell_text row out of range");
  if (is_numeric(col)) return format_double(numeric(col)[row]);
  return category_label(col, codes(col)[row]);
}

Table Table::select_rows(std::span<const size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (size_t c = 0; c < columns_.size(); ++c) {
    if (is_numeric(c)) {
      std::vector<double> v;
      v.reserve(rows.size());
      const auto& src = numeric(c);
      for (const size_t r : rows) v.push_back(src.at(r));
      cols.emplace_back(std::move(v));
    } else {
      std::vector<int32_t> v;
      v.reserve(rows.size());
      const auto& src = codes(c);
      for (const size_t r : rows) v.push_back(src.at(r));
      cols.emplace_back(std::move(v));
    }
  }
  return Table(schema_, std::move(cols));
}

bool Table::schema_compatible(const Table& other) const {
  if (schema_.size() != other.schema_.size()) return false;
  for (size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].name != other.schema_[c].name) return false;
    if (schema_[c].kind != other.schema_[c].kind) return false;
  }
  return true;
}

std::optional<size_t> Table::column_index(std::string_view name) const {
  for (size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].name == name) return c;
  }
  return std::nullopt;
}

Table concat_rows(const Table& a, const Table& b) {
  if (!a.schema_compatible(b)) {
    throw std::invalid_argument("concat_rows: incompatible schemas");
  }
  std::vector<ColumnSchema> schema = a.schema();
  std::vector<Column> cols;
  cols.reserve(schema.size());
  for (size_t c = 0; c < schema.size(); ++c) {
    if (a.is_numeric(c)) {
      std::vector<double> v = a.numeric(c);
      const auto& bv = b.numeric(c);
      v.insert(v.end(), bv.begin(), bv.end());
      cols.emplace_back(std::move(v));
    } else {
      // Remap b's codes into a's label space, appending unseen labels.
      std::unordered_map<std::string_view, int32_t> index;
      for (size_t i = 0; i < schema[c].categories.size(); ++i) {
        index.emplace(schema[c].categories[i], static_cast<int32_t>(i));
      }
      std::vector<int32_t> v = a.codes(c);
      v.reserve(v.size() + b.row_count());
      for (const int32_t code : b.codes(c)) {
        const std::string& label = b.category_label(c, code);
        auto it = index.find(label);
        if (it == index.end()) {
          schema[c].categories.push_back(label);
          it = index.emplace(schema[c].categories.back(), static_cast<int32_t>(schema[c].categories.size() - 1)).first;
        }
        v.push_back(it->second);
      }
      cols.emplace_back(std::move(v));
    }
  }
  return Table(std::move(schema), std::move(cols));
}

SchemaHint parse_schema_hint(const std::string& json_text) {
  const auto parsed = nlohmann::json::parse(json_text, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    throw LoadError("schema hint: not a JSON object");
  }
  SchemaHint hint;
  for (const auto& [key, value] : parsed.items()) {
    if (!value.is_string()) {
      throw LoadError("schema hint: value for '" + key + "' must be a string");
    }
    const std::string kind = value.get<std::string>();
    if (kind == "numeric") {
      hint[key] = ColumnKind::Numeric;
    } else if (kind == "categorical") {
      hint[key] = ColumnKind::Categorical;
    } else {
      throw LoadError("schema hint: unknown kind '" + kind + "' for column '" + key + "'");
    }
  }
  return hint;
}

SchemaHint load_schema_hint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open schema hint file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_schema_hint(ss.str());
}

Table load_table_from_string(const std::string& text, const SchemaHint* hint,
                             const std::string& origin) {
  const RawRows raw = parse_csv(text, origin);
  if (raw.header.empty()) throw LoadError(origin + ": missing header row");
  const size_t n_cols = raw.header.size();
  {
    std::unordered_set<std::string_view> names;
    for (const auto& name : raw.header) {
      if (!names.insert(name).second) {
        throw LoadError(origin + ": duplicate column name '" + name + "'");
      }
    }
  }
  if (raw.rows.empty()) throw LoadError(origin + ": table has no data rows");
  for (size_t r = 0; r < raw.rows.size(); ++r) {
    if (raw.rows[r].size() != n_cols) {
      throw LoadError(origin + ": row " + std::to_string(r + 1) + " has " +
                      std::to_string(raw.rows[r].size()) + " fields, expected " +
                      std::to_string(n_cols));
    }
    for (size_t c = 0; c < n_cols; ++c) {
      if (raw.rows[r][c].empty()) {
        throw LoadError(origin + ": missing value in column '" + raw.header[c] + "', row " +
                        std::to_string(r + 1));
      }
    }
  }

  std::vector<ColumnSchema> schema(n_cols);
  std::vector<Column> columns(n_cols);
  for (size_t c = 0; c < n_cols; ++c) {
    schema[c].name = raw.header[c];

    std::vector<double> values(raw.rows.size());
    bool all_numeric = true;
    for (size_t r = 0; r < raw.rows.size() && all_numeric; ++r) {
      if (const auto v = parse_numeric(raw.rows[r][c])) {
        values[r] = *v;
      } else {
        all_numeric = false;
      }
    }

    ColumnKind kind;
    if (hint && hint->count(schema[c].name)) {
      kind = hint->at(schema[c].name);
      if (kind == ColumnKind::Numeric && !all_numeric) {
        size_t bad = 0;
        for (size_t r = 0; r < raw.rows.size(); ++r) {
          if (!parse_numeric(raw.rows[r][c])) {
            bad = r;
            break;
          }
        }
        throw LoadError(origin + ": column '" + schema[c].name +
                        "' is hinted numeric but row " + std::to_string(bad + 1) +
                        " holds '" + raw.rows[bad][c] + "'");
      }
    } else if (!all_numeric) {
      kind = ColumnKind::Categorical;
    } else {
      // Low-cardinality all-integer columns with repeated values read as
      // categorical; an all-distinct integer column stays numeric.
      std::set<double> distinct;
      bool all_integer = true;
      for (const double v : values) {
        distinct.insert(v);
        if (v != std::floor(v) || std::abs(v) > 9.0e15) all_integer = false;
      }
      kind = (all_integer && distinct.size() <= 20 && distinct.size() < values.size())
                 ? ColumnKind::Categorical
                 : ColumnKind::Numeric;
    }

    schema[c].kind = kind;
    if (kind == ColumnKind::Numeric) {
      columns[c] = std::move(values);
    } else {
      std::unordered_map<std::string, int32_t> index;
      std::vector<int32_t> codes(raw.rows.size());
      for (size_t r = 0; r < raw.rows.size(); ++r) {
        const std::string& label = raw.rows[r][c];
        auto it = index.find(label);
        if (it == index.end()) {
          it = index.emplace(label, static_cast<int32_t>(schema[c].categories.size())).first;
          schema[c].categories.push_back(label);
        }
        codes[r] = it->second;
      }
      columns[c] = std::move(codes);
    }
  }
  return Table(std::move(schema), std::move(columns));
}

Table load_table(const std::string& path, const SchemaHint* hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_table_from_string(ss.str(), hint, path);
}

std::string to_csv_string(const Table& t) {
  std::string out;
  for (size_t c = 0; c < t.column_count(); ++c) {
    if (c) out.push_back(',');
    append_csv_field(out, t.schema(c).name);
  }
  out.push_back('\n');
  for (size_t r = 0; r < t.row_count(); ++r) {
    for (size_t c = 0; c < t.column_count(); ++c) {
      if (c) out.push_back(',');
      append_csv_field(out, t.cell_text(r, c));
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const Table& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot open file for writing: " + path);
  out << to_csv_string(t);
  if (!out) throw LoadError("write failed: " + path);
}

}  // namespace synth_audit
