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

#include "synth_audit/encode.hpp"

#include <algorithm>
#include <stdexcept>

#include "synth_audit/stats.hpp"

namespace synth_audit {

Encoder Encoder::fit(const Table& t) {
  std::vector<size_t> cols(t.column_count());
  for (size_t c = 0; c < cols.size(); ++c) cols[c] = c;
  return fit(t, cols);
}

Encoder Encoder::fit(const Table& t, std::span<const size_t> cols) {
  if (t.row_count() == 0) throw std::invalid_argument("Encoder::fit: empty table");
  if (cols.empty()) throw std::invalid_argument("Encoder::fit: no columns selected");
  Encoder e;
  size_t offset = 0;
  for (const size_t c : cols) {
    ColumnPlan plan;
    plan.name = t.schema(c).name;
    plan.kind = t.schema(c).kind;
    plan.offset = offset;
    if (plan.kind == ColumnKind::Numeric) {
      const auto& v = t.numeric(c);
      plan.stats.mean = mean_of(v);
      const double sd = population_stddev(v);
      plan.stats.stddev = sd < 1e-12 ? 1.0 : sd;
      offset += 1;
    } else {
      const auto& cats = t.schema(c).categories;
      for (size_t i = 0; i < cats.size(); ++i) plan.slot_of_label.emplace(cats[i], i);
      plan.slot_count = cats.size() + 1;  // last slot collects unseen labels
      offset += plan.slot_count;
    }
    e.plan_.push_back(std::move(plan));
  }
  e.dims_ = offset;
  return e;
}

EncodedMatrix Encoder::encode(const Table& t) const {
  EncodedMatrix m;
  m.rows = t.row_count();
  m.dims = dims_;
  m.data.assign(m.rows * m.dims, 0.0);
  for (const ColumnPlan& plan : plan_) {
    const auto col = t.column_index(plan.name);
    if (!col || t.schema(*col).kind != plan.kind) {
      throw std::invalid_argument("Encoder::encode: table lacks fitted column '" + plan.name + "'");
    }
    if (plan.kind == ColumnKind::Numeric) {
      const auto& v = t.numeric(*col);
      for (size_t r = 0; r < m.rows; ++r) {
        m.data[r * m.dims + plan.offset] = (v[r] - plan.stats.mean) / plan.stats.stddev;
      }
    } else {
      const auto& codes = t.codes(*col);
      const size_t unseen_slot = plan.slot_count - 1;
      for (size_t r = 0; r < m.rows; ++r) {
        const std::string& label = t.category_label(*col, codes[r]);
        const auto it = plan.slot_of_label.find(label);
        const size_t slot = it == plan.slot_of_label.end() ? unseen_slot : it->second;
        m.data[r * m.dims + plan.offset + slot] = kCategoryWeight;
      }
    }
  }
  return m;
}

double mixed_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("mixed_distance: dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<size_t> equal_width_bins(std::span<const double> values, size_t k) {
  if (k == 0) throw std::invalid_argument("equal_width_bins: k must be >= 1");
  if (values.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<size_t> bins(values.size(), 0);
  if (hi == lo) return bins;
  const double span = hi - lo;
  for (size_t i = 0; i < values.size(); ++i) {
    const double pos = (values[i] - lo) / span * static_cast<double>(k);
    auto b = static_cast<long long>(std::floor(pos));
    b = std::clamp(b, 0LL, static_cast<long long>(k) - 1LL);
    bins[i] = static_cast<size_t>(b);
  }
  return bins;
}

QuantileBinner::QuantileBinner(std::span<const double> fit_values, size_t k) {
  if (k == 0) throw std::invalid_argument("QuantileBinner: k must be >= 1");
  if (fit_values.empty()) throw std::invalid_argument("QuantileBinner: empty fit vector");
  std::vector<double> sorted(fit_values.begin(), fit_values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  edges.reserve(k + 1);
  for (size_t i = 0; i <= k; ++i) {
    edges.push_back(quantile_sorted(sorted, static_cast<double>(i) / static_cast<double>(k)));
  }
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (edges.size() < 2) {
    // Constant fit vector: a single all-absorbing bin.
    bin_count_ = 1;
    upper_.assign(1, edges.front());
    return;
  }
  upper_.assign(edges.begin() + 1, edges.end());
  bin_count_ = upper_.size();
}

size_t QuantileBinner::assign(double value) const {
  // Count boundaries strictly below the value; values above the top
  // boundary clamp into the last bin.
  const size_t below =
      static_cast<size_t>(std::lower_bound(upper_.begin(), upper_.end(), value,
                                           [](double boundary, double v) { return boundary < v; }) -
                          upper_.begin());
  return std::min(below, bin_count_ - 1);
}

std::vector<size_t> QuantileBinner::assign(std::span<const double> values) const {
  std::vector<size_t> bins(values.size());
  for (size_t i = 0; i < values.size(); ++i) bins[i] = assign(values[i]);
  return bins;
}

std::vector<size_t> quantile_bins(std::span<const double> values, size_t k) {
  if (values.empty()) return {};
  return QuantileBinner(values, k).assign(values);
}

}  // namespace synth_audit
