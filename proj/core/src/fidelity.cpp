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

#include "synth_audit/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "synth_audit/encode.hpp"
#include "synth_audit/stats.hpp"

namespace synth_audit {

namespace {

LabelCounts label_counts(const Table& t, size_t col) {
  LabelCounts counts;
  for (const int32_t code : t.codes(col)) {
    counts[t.category_label(col, code)] += 1.0;
  }
  return counts;
}

// Labels for the numeric side of a mixed pair after decile binning.
std::vector<std::string> binned_labels(const QuantileBinner& binner, std::span<const double> v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const double x : v) out.push_back("b" + std::to_string(binner.assign(x)));
  return out;
}

std::vector<std::string> column_labels(const Table& t, size_t col) {
  std::vector<std::string> out;
  out.reserve(t.row_count());
  for (const int32_t code : t.codes(col)) out.push_back(t.category_label(col, code));
  return out;
}

// 1 - TVD between two normalized joint contingency tables.
double contingency_similarity(const std::vector<std::string>& a1, const std::vector<std::string>& a2,
                              const std::vector<std::string>& b1, const std::vector<std::string>& b2) {
  LabelCounts pa, pb;
  for (size_t i = 0; i < a1.size(); ++i) pa[a1[i] + '\x1f' + a2[i]] += 1.0;
  for (size_t i = 0; i < b1.size(); ++i) pb[b1[i] + '\x1f' + b2[i]] += 1.0;
  return tv_complement(pa, pb);
}

}  // namespace

double ks_complement(std::span<const double> real, std::span<const double> synth) {
  if (real.empty() || synth.empty()) {
    throw std::invalid_argument("ks_complement: inputs must be nonempty");
  }
  std::vector<double> r(real.begin(), real.end());
  std::vector<double> s(synth.begin(), synth.end());
  std::sort(r.begin(), r.end());
  std::sort(s.begin(), s.end());

  // Walk the pooled order; the supremum of |F_r - F_s| is attained at a
  // sample point.
  const double nr = static_cast<double>(r.size());
  const double ns = static_cast<double>(s.size());
  size_t i = 0, j = 0;
  double ks = 0.0;
  while (i < r.size() || j < s.size()) {
    const double v = (j >= s.size() || (i < r.size() && r[i] <= s[j])) ? r[i] : s[j];
    while (i < r.size() && r[i] <= v) ++i;
    while (j < s.size() && s[j] <= v) ++j;
    ks = std::max(ks, std::abs(static_cast<double>(i) / nr - static_cast<double>(j) / ns));
  }
  return 1.0 - ks;
}

double tv_complement(const LabelCounts& real, const LabelCounts& synth) {
  double real_total = 0.0, synth_total = 0.0;
  for (const auto& [label, c] : real) real_total += c;
  for (const auto& [label, c] : synth) synth_total += c;
  if (real_total <= 0.0 || synth_total <= 0.0) {
    throw std::invalid_argument("tv_complement: inputs must be nonempty");
  }
  // Half L1 over the sorted union of categories; a category absent from one
  // side contributes its full mass on the other.
  LabelCounts union_labels = real;
  union_labels.insert(synth.begin(), synth.end());
  double l1 = 0.0;
  for (const auto& [label, unused] : union_labels) {
    const auto r = real.find(label);
    const auto s = synth.find(label);
    const double p = r == real.end() ? 0.0 : r->second / real_total;
    const double q = s == synth.end() ? 0.0 : s->second / synth_total;
    l1 += std::abs(p - q);
  }
  return 1.0 - 0.5 * l1;
}

double tv_complement(const Table& real, size_t real_col, const Table& synth, size_t synth_col) {
  return tv_complement(label_counts(real, real_col), label_counts(synth, synth_col));
}

ColumnShapesResult column_shapes(const Table& real, const Table& synth) {
  if (!real.schema_compatible(synth)) {
    throw std::invalid_argument("column_shapes: real/synth schemas are incompatible");
  }
  if (real.row_count() == 0 || synth.row_count() == 0) {
    throw std::invalid_argument("column_shapes: empty table");
  }
  ColumnShapesResult out;
  double sum = 0.0;
  for (size_t c = 0; c < real.column_count(); ++c) {
    const double score = real.is_numeric(c)
                             ? ks_complement(real.numeric(c), synth.numeric(c))
                             : tv_complement(real, c, synth, c);
    out.columns.push_back({real.schema(c).name, score});
    sum += score;
  }
  out.mean = sum / static_cast<double>(real.column_count());
  return out;
}

PairTrendsResult pair_trends(const Table& real, const Table& synth, size_t quantile_bins) {
  if (!real.schema_compatible(synth)) {
    throw std::invalid_argument("pair_trends: real/synth schemas are incompatible");
  }
  if (real.column_count() < 2) {
    throw std::invalid_argument("pair_trends: at least two columns required");
  }
  if (real.row_count() == 0 || synth.row_count() == 0) {
    throw std::invalid_argument("pair_trends: empty table");
  }

  PairTrendsResult out;
  double sum = 0.0;
  for (size_t a = 0; a < real.column_count(); ++a) {
    for (size_t b = a + 1; b < real.column_count(); ++b) {
      PairTrendScore pair;
      pair.column_a = real.schema(a).name;
      pair.column_b = real.schema(b).name;
      const bool a_num = real.is_numeric(a);
      const bool b_num = real.is_numeric(b);
      if (a_num && b_num) {
        const auto is_constant = [](std::span<const double> v) {
          return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
        };
        pair.constant_column = is_constant(real.numeric(a)) || is_constant(real.numeric(b)) ||
                               is_constant(synth.numeric(a)) || is_constant(synth.numeric(b));
        const double rho_r = pearson(real.numeric(a), real.numeric(b));
        const double rho_s = pearson(synth.numeric(a), synth.numeric(b));
        pair.score = 1.0 - std::abs(rho_r - rho_s) / 2.0;
      } else if (!a_num && !b_num) {
        pair.score = contingency_similarity(column_labels(real, a), column_labels(real, b),
                                            column_labels(synth, a), column_labels(synth, b));
      } else {
        const size_t num_col = a_num ? a : b;
        const size_t cat_col = a_num ? b : a;
        // Bin boundaries come from the real column; synthetic values beyond
        // the real range clamp into the end bins.
        const QuantileBinner binner(real.numeric(num_col), quantile_bins);
        pair.score = contingency_similarity(
            binned_labels(binner, real.numeric(num_col)), column_labels(real, cat_col),
            binned_labels(binner, synth.numeric(num_col)), column_labels(synth, cat_col));
      }
      sum += pair.score;
      out.pairs.push_back(std::move(pair));
    }
  }
  out.mean = sum / static_cast<double>(out.pairs.size());
  return out;
}

double beta_recall(const Table& real, const Table& synth, size_t k) {
  if (synth.row_count() <= k) {
    throw std::invalid_argument("beta_recall: need more synthetic rows than k");
  }
  if (real.row_count() == 0) throw std::invalid_argument("beta_recall: empty real table");

  const Encoder enc = Encoder::fit(concat_rows(real, synth));
  const EncodedMatrix re = enc.encode(real);
  const EncodedMatrix se = enc.encode(synth);

  // k-NN radius of each synthetic row within the synthetic set.
  std::vector<double> radii(se.rows);
  std::vector<double> dists;
  for (size_t i = 0; i < se.rows; ++i) {
    dists.clear();
    for (size_t j = 0; j < se.rows; ++j) {
      if (j == i) continue;
      dists.push_back(mixed_distance(se.row(i), se.row(j)));
    }
    std::nth_element(dists.begin(), dists.begin() + static_cast<ptrdiff_t>(k - 1), dists.end());
    radii[i] = dists[k - 1];
  }
  std::sort(radii.begin(), radii.end());

  std::vector<double> nn(re.rows);
  for (size_t i = 0; i < re.rows; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < se.rows; ++j) {
      best = std::min(best, mixed_distance(re.row(i), se.row(j)));
    }
    nn[i] = best;
  }

  double total = 0.0;
  size_t steps = 0;
  for (int b = 1; b <= 19; ++b) {
    const double beta = 0.05 * static_cast<double>(b);
    const double radius = quantile_sorted(radii, beta);
    size_t covered = 0;
    for (const double d : nn) {
      if (d <= radius) ++covered;
    }
    total += static_cast<double>(covered) / static_cast<double>(nn.size());
    ++steps;
  }
  return total / static_cast<double>(steps);
}

}  // namespace synth_audit
