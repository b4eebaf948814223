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

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synth_audit/mia.hpp"
#include "synth_audit/table.hpp"

namespace synth_audit {

inline constexpr std::array<double, 4> kFprGrid{0.0, 0.001, 0.01, 0.1};

// Mann-Whitney rank AUC with tie credit 0.5; equals the pairwise oracle.
double roc_auc(const ScoreVector& sv);

// TPR of the observed-score threshold with the largest empirical FPR still
// <= target; ties at the threshold classify as negative ("score > t"), so
// FPR = 0 means thresholding at the maximum non-member score.
double tpr_at_fpr(const ScoreVector& sv, double target_fpr);

struct AttackReport {
  AttackSpec spec;
  double auc = 0.0;
  std::array<double, kFprGrid.size()> tpr = {};  // aligned with kFprGrid
};

AttackReport evaluate_attack(const AttackSpec& spec, const ScoreVector& sv);

struct LeakageSummary {
  double worst_case_auc = 0.0;
  AttackSpec worst_attack;
  std::array<double, kFprGrid.size()> worst_tpr = {};
};

// Empirical worst case: the argmax-AUC attack with its full TPR grid.
// AUC ties resolve by attack name so the result is order-free.
LeakageSummary worst_case(std::span<const AttackReport> reports);

// Value-level rarity from the training table: categorical labels with
// frequency <= 5%, and numeric values in <= 5%-occupancy bins of a 20-bin
// equal-width histogram over the train range (out-of-range counts as rare).
// A query row is rare iff it contains at least one rare value.
std::vector<bool> rare_mask(const Table& train, const Table& queries);

struct RareClassResult {
  std::optional<double> auc;  // worst-case AUC restricted to rare rows
  std::optional<AttackName> worst_attack;
  std::string undefined_reason;  // set when auc is empty
  size_t rare_rows = 0;
};

// Reuses the full-query attack scores, restricted to rare-flagged queries.
RareClassResult rare_class_auc(std::span<const AttackRun> runs, const std::vector<bool>& mask);

// Fraction of synthetic rows strictly closer to train than to holdout
// (mixed distance, encoder fitted on train + holdout); ties credit 0.5.
double prop_closer(const Table& synth, const Table& train, const Table& holdout);

}  // namespace synth_audit
