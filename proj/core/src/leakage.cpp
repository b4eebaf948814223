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

#include "synth_audit/leakage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "synth_audit/encode.hpp"

namespace synth_audit {

namespace {

void check_score_vector(const ScoreVector& sv) {
  if (sv.scores.size() != sv.labels.size() || sv.scores.empty()) {
    throw std::invalid_argument("ScoreVector: scores/labels must be nonempty and equal length");
  }
  bool has_pos = false, has_neg = false;
  for (const int l : sv.labels) {
    (l ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw std::invalid_argument("ScoreVector: both member and non-member labels required");
  }
}

}  // namespace

double roc_auc(const ScoreVector& sv) {
  check_score_vector(sv);
  const size_t n = sv.scores.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return sv.scores[a] < sv.scores[b]; });

  // Rank-sum with midranks for ties; numerator values are multiples of 0.5,
  // so the result matches the O(n^2) pairwise statistic exactly.
  double rank_sum_pos = 0.0;
  size_t n_pos = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && sv.scores[order[j]] == sv.scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t t = i; t < j; ++t) {
      if (sv.labels[order[t]]) {
        rank_sum_pos += midrank;
        ++n_pos;
      }
    }
    i = j;
  }
  const size_t n_neg = n - n_pos;
  const double pos = static_cast<double>(n_pos);
  return (rank_sum_pos - pos * (pos + 1.0) / 2.0) / (pos * static_cast<double>(n_neg));
}

double tpr_at_fpr(const ScoreVector& sv, double target_fpr) {
  check_score_vector(sv);
  if (target_fpr < 0.0 || target_fpr > 1.0) {
    throw std::invalid_argument("tpr_at_fpr: target must be in [0, 1]");
  }
  double n_pos = 0.0, n_neg = 0.0;
  for (const int l : sv.labels) {
    (l ? n_pos : n_neg) += 1.0;
  }

  // Candidate thresholds: every observed score (plus -inf for "accept all").
  std::vector<double> thresholds(sv.scores);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(-std::numeric_limits<double>::infinity());

  double best_fpr = -1.0, best_tpr = 0.0;
  for (const double t : thresholds) {
    double tp = 0.0, fp = 0.0;
    for (size_t i = 0; i < sv.scores.size(); ++i) {
      if (sv.scores[i] > t) {
        (sv.labels[i] ? tp : fp) += 1.0;
      }
    }
    const double fpr = fp / n_neg;
    const double tpr = tp / n_pos;
    if (fpr > target_fpr) continue;
    if (fpr > best_fpr || (fpr == best_fpr && tpr > best_tpr)) {
      best_fpr = fpr;
      best_tpr = tpr;
    }
  }
  return best_tpr;
}

AttackReport evaluate_attack(const AttackSpec& spec, const ScoreVector& sv) {
  AttackReport report;
  report.spec = spec;
  report.auc = roc_auc(sv);
  for (size_t i = 0; i < kFprGrid.size(); ++i) {
    report.tpr[i] = tpr_at_fpr(sv, kFprGrid[i]);
  }
  return report;
}

LeakageSummary worst_case(std::span<const AttackReport> reports) {
  if (reports.empty()) throw std::invalid_argument("worst_case: no attack reports");
  const AttackReport* best = &reports[0];
  for (const AttackReport& r : reports.subspan(1)) {
    if (r.auc > best->auc ||
        (r.auc == best->auc && to_string(r.spec.name) < to_string(best->spec.name))) {
      best = &r;
    }
  }
  LeakageSummary summary;
  summary.worst_case_auc = best->auc;
  summary.worst_attack = best->spec;
  summary.worst_tpr = best->tpr;
  return summary;
}

std::vector<bool> rare_mask(const Table& train, const Table& queries) {
  if (!train.schema_compatible(queries)) {
    throw std::invalid_argument("rare_mask: train/query schemas differ");
  }
  constexpr double kRareFraction = 0.05;
  constexpr size_t kNumericBins = 20;
  const double n_train = static_cast<double>(train.row_count());

  std::vector<bool> rare(queries.row_count(), false);
  for (size_t c = 0; c < train.column_count(); ++c) {
    if (train.is_numeric(c)) {
      const auto& tv = train.numeric(c);
      const auto [lo_it, hi_it] = std::minmax_element(tv.begin(), tv.end());
      const double lo = *lo_it, hi = *hi_it;
      const auto train_bins = equal_width_bins(tv, kNumericBins);
      std::array<double, kNumericBins> occupancy{};
      for (const size_t b : train_bins) occupancy[b] += 1.0;

      const auto& qv = queries.numeric(c);
      for (size_t r = 0; r < qv.size(); ++r) {
        if (rare[r]) continue;
        const double v = qv[r];
        if (v < lo || v > hi) {
          rare[r] = true;
          continue;
        }
        size_t bin = 0;
        if (hi > lo) {
          const double pos = (v - lo) / (hi - lo) * static_cast<double>(kNumericBins);
          bin = std::min(static_cast<size_t>(pos), kNumericBins - 1);
        }
        if (occupancy[bin] / n_train <= kRareFraction) rare[r] = true;
      }
    } else {
      std::map<std::string, double> freq;
      for (const int32_t code : train.codes(c)) freq[train.category_label(c, code)] += 1.0;
      const auto& codes = queries.codes(c);
      for (size_t r = 0; r < codes.size(); ++r) {
        if (rare[r]) continue;
        const auto it = freq.find(queries.category_label(c, codes[r]));
        const double count = it == freq.end() ? 0.0 : it->second;
        if (count / n_train <= kRareFraction) rare[r] = true;
      }
    }
  }
  return rare;
}

RareClassResult rare_class_auc(std::span<const AttackRun> runs, const std::vector<bool>& mask) {
  RareClassResult result;
  result.rare_rows = static_cast<size_t>(std::count(mask.begin(), mask.end(), true));

  std::vector<AttackReport> restricted;
  for (const AttackRun& run : runs) {
    if (!run.scores) continue;
    const ScoreVector& sv = *run.scores;
    if (sv.labels.size() != mask.size()) {
      throw std::invalid_argument("rare_class_auc: mask/scores length mismatch");
    }
    ScoreVector sub;
    for (size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      sub.scores.push_back(sv.scores[i]);
      sub.labels.push_back(sv.labels[i]);
    }
    bool has_pos = false, has_neg = false;
    for (const int l : sub.labels) {
      (l ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
      result.undefined_reason = result.rare_rows == 0
                                    ? "no rare rows among queries"
                                    : "rare subset lacks one of the label classes";
      return result;
    }
    AttackReport r;
    r.spec = run.spec;
    r.auc = roc_auc(sub);
    restricted.push_back(std::move(r));
  }
  if (restricted.empty()) {
    result.undefined_reason = "no attack scores available";
    return result;
  }
  const LeakageSummary summary = worst_case(restricted);
  result.auc = summary.worst_case_auc;
  result.worst_attack = summary.worst_attack.name;
  return result;
}

double prop_closer(const Table& synth, const Table& train, const Table& holdout) {
  if (synth.row_count() == 0) throw std::invalid_argument("prop_closer: empty synthetic table");
  const Encoder enc = Encoder::fit(concat_rows(train, holdout));
  const EncodedMatrix se = enc.encode(synth);
  const EncodedMatrix te = enc.encode(train);
  const EncodedMatrix he = enc.encode(holdout);

  double credit = 0.0;
  for (size_t i = 0; i < se.rows; ++i) {
    const auto row = se.row(i);
    double d_train = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < te.rows; ++j) d_train = std::min(d_train, mixed_distance(row, te.row(j)));
    double d_holdout = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < he.rows; ++j) d_holdout = std::min(d_holdout, mixed_distance(row, he.row(j)));
    if (d_train < d_holdout) {
      credit += 1.0;
    } else if (d_train == d_holdout) {
      credit += 0.5;
    }
  }
  return credit / static_cast<double>(se.rows);
}

}  // namespace synth_audit
