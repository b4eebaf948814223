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

#include "synth_audit/utility_eval.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "synth_audit/encode.hpp"
#include "synth_audit/leakage.hpp"
#include "synth_audit/learners.hpp"
#include "synth_audit/rng.hpp"

namespace synth_audit {

namespace {

// predict(row) -> per-synthetic-class probabilities.
using ProbaFn = std::function<std::vector<double>(size_t holdout_row)>;

struct EvalContext {
  const Table& synth;
  const Table& holdout;
  size_t target = 0;
  std::vector<size_t> synth_class_rows;  // per synth category
};

// Macro one-vs-rest AUC of one fitted classifier on the holdout.
void score_classifier(const EvalContext& ctx, const ProbaFn& proba, ClassifierResult& out) {
  const Table& holdout = ctx.holdout;
  const size_t target = ctx.target;
  const auto& holdout_codes = holdout.codes(target);
  const size_t n = holdout.row_count();

  // Distinct holdout classes, in category order.
  std::vector<size_t> holdout_counts(holdout.schema(target).categories.size(), 0);
  for (const int32_t code : holdout_codes) ++holdout_counts[static_cast<size_t>(code)];

  // Probabilities computed once per row.
  std::vector<std::vector<double>> probs(n);
  for (size_t r = 0; r < n; ++r) probs[r] = proba(r);

  double sum = 0.0;
  size_t scored = 0;
  for (size_t hc = 0; hc < holdout_counts.size(); ++hc) {
    if (holdout_counts[hc] == 0) continue;
    if (holdout_counts[hc] == n) {
      // One-vs-rest needs both sides in the holdout.
      out.skipped_classes.push_back(holdout.schema(target).categories[hc]);
      continue;
    }
    const std::string& label = holdout.schema(target).categories[hc];
    // Locate the class in the synthetic target's category list.
    const auto& synth_cats = ctx.synth.schema(target).categories;
    const auto it = std::find(synth_cats.begin(), synth_cats.end(), label);
    const bool absent = it == synth_cats.end() ||
                        ctx.synth_class_rows[static_cast<size_t>(it - synth_cats.begin())] == 0;
    if (absent) {
      out.flagged_classes.push_back(label);
      sum += 0.5;
      ++scored;
      continue;
    }
    const auto sc = static_cast<size_t>(it - synth_cats.begin());
    ScoreVector sv;
    sv.scores.resize(n);
    sv.labels.resize(n);
    for (size_t r = 0; r < n; ++r) {
      sv.scores[r] = probs[r][sc];
      sv.labels[r] = holdout_codes[r] == static_cast<int32_t>(hc) ? 1 : 0;
    }
    sum += roc_auc(sv);
    ++scored;
  }
  if (scored == 0) {
    out.failure_reason = "no scorable holdout classes";
    return;
  }
  out.macro_auc = sum / static_cast<double>(scored);
}

}  // namespace

UtilityReport eval_utility(const Table& synth, const Table& holdout, uint64_t seed) {
  if (!synth.schema_compatible(holdout)) {
    throw std::invalid_argument("eval_utility: synth/holdout schemas differ");
  }
  const size_t target = synth.target_column();
  if (synth.is_numeric(target)) {
    throw std::invalid_argument("eval_utility: target must be categorical");
  }

  UtilityReport report;
  report.classifiers.resize(4);
  report.classifiers[0].name = "logistic_regression";
  report.classifiers[1].name = "naive_bayes";
  report.classifiers[2].name = "decision_tree";
  report.classifiers[3].name = "random_forest";

  EvalContext ctx{synth, holdout, target, {}};
  ctx.synth_class_rows.assign(synth.schema(target).categories.size(), 0);
  for (const int32_t code : synth.codes(target)) ++ctx.synth_class_rows[static_cast<size_t>(code)];
  const size_t distinct_classes = static_cast<size_t>(
      std::count_if(ctx.synth_class_rows.begin(), ctx.synth_class_rows.end(),
                    [](size_t c) { return c > 0; }));
  if (distinct_classes < 2) {
    for (auto& clf : report.classifiers) clf.failure_reason = "synthetic data has a single class";
    return report;
  }

  // Feature columns (everything but the target), encoded with statistics
  // from the synthetic table -- the only data a downstream user would own.
  std::vector<size_t> feature_cols;
  for (size_t c = 0; c < synth.column_count(); ++c) {
    if (c != target) feature_cols.push_back(c);
  }
  const Encoder enc = Encoder::fit(synth, feature_cols);
  const EncodedMatrix xs = enc.encode(synth);
  const EncodedMatrix xh = enc.encode(holdout);
  const auto& ys = synth.codes(target);
  const size_t n_classes = synth.schema(target).categories.size();

  // Logistic regression.
  try {
    LogisticRegression clf;
    clf.fit(xs, ys, n_classes);
    score_classifier(ctx, [&](size_t r) { return clf.predict_proba(xh.row(r)); },
                     report.classifiers[0]);
  } catch (const std::exception& e) {
    report.classifiers[0].failure_reason = e.what();
  }

  // Naive Bayes on raw columns.
  try {
    NaiveBayes clf;
    clf.fit(synth, target);
    score_classifier(ctx, [&](size_t r) { return clf.predict_proba(holdout, r); },
                     report.classifiers[1]);
  } catch (const std::exception& e) {
    report.classifiers[1].failure_reason = e.what();
  }

  // Decision tree.
  try {
    DecisionTree clf;
    clf.fit(xs, ys, n_classes);
    score_classifier(ctx, [&](size_t r) { return clf.predict_proba(xh.row(r)); },
                     report.classifiers[2]);
  } catch (const std::exception& e) {
    report.classifiers[2].failure_reason = e.what();
  }

  // Random forest.
  try {
    RandomForest clf;
    clf.fit(xs, ys, n_classes, seed_combine(seed, fnv1a("utility_forest")));
    score_classifier(ctx, [&](size_t r) { return clf.predict_proba(xh.row(r)); },
                     report.classifiers[3]);
  } catch (const std::exception& e) {
    report.classifiers[3].failure_reason = e.what();
  }

  double sum = 0.0;
  size_t ok = 0;
  for (const auto& clf : report.classifiers) {
    if (clf.macro_auc) {
      sum += *clf.macro_auc;
      ++ok;
    }
  }
  if (ok > 0) report.mean_macro_auc = sum / static_cast<double>(ok);
  return report;
}

}  // namespace synth_audit
