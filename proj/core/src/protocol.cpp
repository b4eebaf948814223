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

#include "synth_audit/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synth_audit/rng.hpp"
#include "synth_audit/stats.hpp"

namespace synth_audit {

namespace {

void warn(std::vector<std::string>* warnings, std::string msg) {
  if (warnings) warnings->push_back(std::move(msg));
}

// Rows grouped by target class, classes in category-code order.
std::vector<std::vector<size_t>> rows_by_class(const Table& t, std::span<const size_t> rows) {
  const size_t target = t.target_column();
  const auto& codes = t.codes(target);
  std::vector<std::vector<size_t>> groups(t.schema(target).categories.size());
  for (const size_t r : rows) {
    groups[static_cast<size_t>(codes[r])].push_back(r);
  }
  return groups;
}

// Largest-remainder (Hamilton) allocation of n across class quotas; keeps
// every allocation within one row of exact proportionality.
std::vector<size_t> hamilton_allocate(const std::vector<size_t>& counts, size_t n) {
  const size_t total = std::accumulate(counts.begin(), counts.end(), size_t{0});
  std::vector<size_t> alloc(counts.size(), 0);
  if (total == 0 || n == 0) return alloc;
  std::vector<std::pair<double, size_t>> remainders;  // (-remainder, class)
  size_t assigned = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    const double quota =
        static_cast<double>(n) * static_cast<double>(counts[i]) / static_cast<double>(total);
    alloc[i] = static_cast<size_t>(std::floor(quota));
    assigned += alloc[i];
    remainders.emplace_back(-(quota - std::floor(quota)), i);
  }
  std::sort(remainders.begin(), remainders.end());
  for (size_t j = 0; assigned < n && j < remainders.size(); ++j) {
    const size_t i = remainders[j].second;
    if (alloc[i] < counts[i]) {
      ++alloc[i];
      ++assigned;
    }
  }
  // Guard for caps hit above (only possible when n == total).
  for (size_t i = 0; assigned < n && i < counts.size(); ++i) {
    while (assigned < n && alloc[i] < counts[i]) {
      ++alloc[i];
      ++assigned;
    }
  }
  return alloc;
}

}  // namespace

SplitResult stratified_split(const Table& t, double test_frac, uint64_t seed,
                             std::vector<std::string>* warnings) {
  if (!(test_frac > 0.0 && test_frac < 1.0)) {
    throw std::invalid_argument("stratified_split: test_frac must be in (0, 1)");
  }
  const size_t target = t.target_column();
  if (t.is_numeric(target)) {
    throw std::invalid_argument(
        "stratified_split: target column is numeric; discretize_target first");
  }

  std::vector<size_t> all(t.row_count());
  std::iota(all.begin(), all.end(), size_t{0});
  auto groups = rows_by_class(t, all);

  const size_t n_rows = t.row_count();
  const auto global_total = static_cast<size_t>(std::llround(static_cast<double>(n_rows) * test_frac));

  struct ClassAlloc {
    size_t count = 0;
    size_t take = 0;   // test rows
    size_t cap = 0;    // leave at least one row in train
    double quota = 0.0;
  };
  std::vector<ClassAlloc> alloc(groups.size());
  size_t assigned = 0;
  for (size_t i = 0; i < groups.size(); ++i) {
    ClassAlloc& a = alloc[i];
    a.count = groups[i].size();
    a.quota = static_cast<double>(a.count) * test_frac;
    a.cap = a.count > 0 ? a.count - 1 : 0;
    if (a.count == 1) {
      warn(warnings, "stratified_split: class '" +
                         t.schema(target).categories[i] + "' has a single row; forced into train");
    }
    a.take = std::min(static_cast<size_t>(std::llround(a.quota)), a.cap);
    assigned += a.take;
  }

  // Nudge allocations by one row at a time toward the global total, always
  // moving whichever class currently deviates most from its quota (ties go
  // to the lower class index). No class moves below 0 or above its cap.
  while (assigned != global_total) {
    const bool need_more = assigned < global_total;
    double best_dev = -1.0;
    size_t best = alloc.size();
    for (size_t i = 0; i < alloc.size(); ++i) {
      const ClassAlloc& a = alloc[i];
      if (need_more && (a.take >= a.cap)) continue;
      if (!need_more && a.take == 0) continue;
      const double dev = need_more ? a.quota - static_cast<double>(a.take)
                                   : static_cast<double>(a.take) - a.quota;
      if (dev > best_dev) {
        best_dev = dev;
        best = i;
      }
    }
    if (best == alloc.size()) break;  // caps exhausted; stay as close as possible
    if (need_more) {
      ++alloc[best].take;
      ++assigned;
    } else {
      --alloc[best].take;
      --assigned;
    }
  }

  SplitResult out;
  Rng rng(seed_combine(seed, fnv1a("stratified_split")));
  for (size_t i = 0; i < groups.size(); ++i) {
    auto& rows = groups[i];
    rng.shuffle(rows);
    for (size_t j = 0; j < rows.size(); ++j) {
      (j < alloc[i].take ? out.test_idx : out.train_idx).push_back(rows[j]);
    }
  }
  std::sort(out.train_idx.begin(), out.train_idx.end());
  std::sort(out.test_idx.begin(), out.test_idx.end());
  return out;
}

std::vector<AuditCell> make_cells(const Table& t, const std::string& dataset_id,
                                  std::span<const size_t> sizes, std::span<const uint64_t> seeds,
                                  double test_frac, uint64_t split_seed,
                                  std::vector<std::string>* warnings) {
  const SplitResult split = stratified_split(t, test_frac, split_seed, warnings);
  const auto groups = rows_by_class(t, split.train_idx);
  std::vector<size_t> class_counts(groups.size());
  for (size_t i = 0; i < groups.size(); ++i) class_counts[i] = groups[i].size();

  std::vector<AuditCell> cells;
  for (const size_t n : sizes) {
    if (n == 0 || n > split.train_idx.size()) {
      warn(warnings, "make_cells: subset size " + std::to_string(n) +
                         " exceeds train partition (" + std::to_string(split.train_idx.size()) +
                         " rows); cell skipped");
      continue;
    }
    const std::vector<size_t> take = hamilton_allocate(class_counts, n);
    for (const uint64_t seed : seeds) {
      AuditCell cell;
      cell.dataset_id = dataset_id;
      cell.n = n;
      cell.seed = seed;
      Rng rng(seed_combine(seed, seed_combine(fnv1a("make_cells"), n)));
      for (size_t i = 0; i < groups.size(); ++i) {
        std::vector<size_t> rows = groups[i];
        rng.shuffle(rows);
        for (size_t j = 0; j < rows.size(); ++j) {
          (j < take[i] ? cell.train_idx : cell.reference_idx).push_back(rows[j]);
        }
      }
      cell.holdout_idx = split.test_idx;
      std::sort(cell.train_idx.begin(), cell.train_idx.end());
      std::sort(cell.reference_idx.begin(), cell.reference_idx.end());
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

Table discretize_target(const Table& t, size_t bins) {
  if (bins < 2) throw std::invalid_argument("discretize_target: bins must be >= 2");
  const size_t target = t.target_column();
  if (!t.is_numeric(target)) {
    throw std::invalid_argument("discretize_target: target column is already categorical");
  }
  const auto& values = t.numeric(target);

  // Interior quantile edges on the full table; a value joins the bin counted
  // by edges strictly below it, and bins left empty by tied edges merge away.
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (size_t i = 1; i < bins; ++i) {
    edges.push_back(quantile_sorted(sorted, static_cast<double>(i) / static_cast<double>(bins)));
  }

  std::vector<size_t> raw_bins(values.size());
  std::vector<size_t> occupancy(bins, 0);
  for (size_t r = 0; r < values.size(); ++r) {
    // Bin index = number of edges strictly below the value.
    const size_t b = static_cast<size_t>(
        std::lower_bound(edges.begin(), edges.end(), values[r]) - edges.begin());
    raw_bins[r] = b;
    ++occupancy[b];
  }
  std::vector<int32_t> relabel(bins, -1);
  int32_t next = 0;
  for (size_t b = 0; b < bins; ++b) {
    if (occupancy[b] > 0) relabel[b] = next++;
  }
  if (next < 2) {
    throw std::invalid_argument("discretize_target: constant target cannot be discretized");
  }

  ColumnSchema target_schema;
  target_schema.name = t.schema(target).name;
  target_schema.kind = ColumnKind::Categorical;
  for (int32_t b = 0; b < next; ++b) {
    target_schema.categories.push_back("q" + std::to_string(b + 1));
  }

  std::vector<int32_t> codes(values.size());
  for (size_t r = 0; r < values.size(); ++r) {
    codes[r] = relabel[raw_bins[r]];
  }

  std::vector<ColumnSchema> schema = t.schema();
  schema[target] = std::move(target_schema);
  std::vector<Column> columns;
  columns.reserve(t.column_count());
  for (size_t c = 0; c < t.column_count(); ++c) {
    if (c == target) {
      columns.emplace_back(std::move(codes));
    } else if (t.is_numeric(c)) {
      columns.emplace_back(t.numeric(c));
    } else {
      columns.emplace_back(t.codes(c));
    }
  }
  return Table(std::move(schema), std::move(columns));
}

}  // namespace synth_audit
