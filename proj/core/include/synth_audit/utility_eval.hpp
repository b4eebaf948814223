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
#include <optional>
#include <string>
#include <vector>

#include "synth_audit/table.hpp"

namespace synth_audit {

struct ClassifierResult {
  std::string name;
  std::optional<double> macro_auc;
  std::string failure_reason;               // set when macro_auc is empty
  std::vector<std::string> flagged_classes;  // holdout classes absent from synth (scored 0.5)
  std::vector<std::string> skipped_classes;  // single-label holdout classes (not scorable)
};

struct UtilityReport {
  std::vector<ClassifierResult> classifiers;
  std::optional<double> mean_macro_auc;  // over successful classifiers only
};

// Trains logistic regression, naive Bayes, a CART tree and a random forest
// on the synthetic rows, then scores per-class one-vs-rest ROC AUC on the
// real holdout, macro-averaged. Holdout classes with no synthetic rows
// contribute 0.5 and are flagged. Deterministic given seed.
UtilityReport eval_utility(const Table& synth, const Table& holdout, uint64_t seed);

}  // namespace synth_audit
